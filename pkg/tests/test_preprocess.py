"""Character cleaning, tokenization, and stop-word removal behavior."""

import re
import string

import numpy as np
import pytest

from sentigram.preprocess import (
    BUILTIN_STOPLIST_TAG,
    StopList,
    clean_text,
    load_stoplist,
    preprocess,
    remove_stopwords,
    tokenize,
)

TOKEN_RE = re.compile(r"^[a-z0-9]+$")


def random_raw_strings(rng, count=200, max_len=40):
    """Raw strings mixing letters, digits, punctuation, and non-ASCII."""
    alphabet = string.ascii_letters + string.digits + string.punctuation + " \t\n" + "éßλ漢"
    out = []
    for _ in range(count):
        n = int(rng.integers(0, max_len))
        out.append("".join(alphabet[i] for i in rng.integers(0, len(alphabet), size=n)))
    return out


class TestCleanText:
    def test_each_non_alphanumeric_becomes_one_space(self):
        assert clean_text("a.b") == "a b"
        assert clean_text("doesn't") == "doesn t"
        assert clean_text("@#$%") == "    "

    def test_alphanumerics_pass_through(self):
        assert clean_text("abc123") == "abc123"

    def test_output_alphabet(self):
        rng = np.random.default_rng(7)
        for raw in random_raw_strings(rng):
            cleaned = clean_text(raw)
            assert all(ch.isascii() and (ch.isalnum() or ch == " ") for ch in cleaned)

    def test_idempotent(self):
        rng = np.random.default_rng(8)
        for raw in random_raw_strings(rng):
            once = clean_text(raw)
            assert clean_text(once) == once

    def test_non_ascii_letters_removed(self):
        assert tokenize(clean_text("café")) == ["caf"]


class TestTokenize:
    def test_lowercases_and_splits(self):
        assert tokenize("Does N T Work") == ["does", "n", "t", "work"]

    def test_empty_string(self):
        assert tokenize("") == []

    def test_space_runs_collapse(self):
        assert tokenize("a  b") == ["a", "b"]

    def test_tokens_match_closed_alphabet(self):
        rng = np.random.default_rng(9)
        for raw in random_raw_strings(rng):
            for token in tokenize(clean_text(raw)):
                assert TOKEN_RE.match(token), token


class TestRemoveStopwords:
    def test_drops_listed_tokens(self):
        sl = StopList(words=frozenset({"this", "is"}), source_tag="test")
        assert remove_stopwords(["this", "is", "awesome"], sl) == ["awesome"]

    def test_empty_input(self):
        sl = StopList(words=frozenset({"a"}), source_tag="test")
        assert remove_stopwords([], sl) == []

    def test_identity_when_no_match(self):
        sl = StopList(words=frozenset({"the"}), source_tag="test")
        assert remove_stopwords(["bug"], sl) == ["bug"]

    def test_output_is_subsequence_of_input(self):
        rng = np.random.default_rng(10)
        vocab = [f"w{i}" for i in range(12)]
        sl = StopList(words=frozenset(vocab[:4]), source_tag="test")
        for _ in range(100):
            tokens = [vocab[i] for i in rng.integers(0, len(vocab), size=rng.integers(0, 20))]
            survivors = remove_stopwords(tokens, sl)
            it = iter(tokens)
            assert all(s in it for s in survivors)  # order-preserving subsequence
            assert not set(survivors) & sl.words


class TestLoadStoplist:
    def test_builtin_list(self):
        sl = load_stoplist()
        assert sl.source_tag == BUILTIN_STOPLIST_TAG
        assert len(sl.words) > 50
        assert {"the", "is", "a", "of"} <= sl.words
        assert all(w == w.lower() and w for w in sl.words)

    def test_contraction_stems_present(self):
        # character cleaning splits "doesn't" into [doesn, t]; the bare stem
        # must be removable like any other function word
        sl = load_stoplist()
        assert "t" in sl.words
        assert "s" in sl.words

    def test_custom_file_with_comments(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("# a comment\nFoo\n\nbar # trailing\n", encoding="utf-8")
        sl = load_stoplist(path)
        assert sl.words == frozenset({"foo", "bar"})
        assert sl.source_tag == f"file:{path}"


class TestPreprocessPipeline:
    def test_full_pipeline(self):
        sl = StopList(words=frozenset({"t", "does"}), source_tag="test")
        assert preprocess("Doesn't WORK!", sl) == ["doesn", "work"]

    def test_without_stoplist_keeps_everything(self):
        assert preprocess("The app is great") == ["the", "app", "is", "great"]

    def test_punctuation_only_input(self):
        assert preprocess(":-) !!") == []

    def test_deterministic(self):
        sl = load_stoplist()
        raw = "This release FIXES the crash (#123), thanks!"
        assert preprocess(raw, sl) == preprocess(raw, sl)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
