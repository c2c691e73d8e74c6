import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nordial import (
    Label,
    LexiconError,
    TermLexicon,
    default_lexicon,
    filter_candidates,
    load_lexicon,
    match_terms,
    tokenize,
)

BK, NN, DI = Label.BOKMAL, Label.NYNORSK, Label.DIALECT


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []
        assert tokenize("   \n\t ") == []

    def test_dialect_sentence(self):
        assert tokenize("Æ ha løsst å fær dit.") == ["æ", "ha", "løsst", "å", "fær", "dit", "."]

    def test_emoji_sentence(self):
        tokens = tokenize("Nå vet du åssen æ har hatt det i noen år 😅")
        assert len(tokens) == 12
        assert tokens[-1] == "😅"
        assert tokens[:4] == ["nå", "vet", "du", "åssen"]

    def test_emoji_glued_to_word(self):
        assert tokenize("noen år😅") == ["noen", "år", "😅"]
        assert tokenize("😅😅") == ["😅", "😅"]

    def test_edge_punctuation_detached_in_order(self):
        assert tokenize("(hei!)") == ["(", "hei", "!", ")"]
        assert tokenize("dit..") == ["dit", ".", "."]
        assert tokenize("«sitat»") == ["«", "sitat", "»"]

    def test_internal_punctuation_kept(self):
        assert tokenize("it's e-post kl.10") == ["it's", "e-post", "kl.10"]

    def test_mentions_hashtags_urls_single_tokens(self):
        assert tokenize("@ola ser #dialekt https://eksempel.no/sak?id=1") == [
            "@ola", "ser", "#dialekt", "https://eksempel.no/sak?id=1"
        ]

    def test_lowercases(self):
        assert tokenize("JEG HAR") == ["jeg", "har"]

    def test_idempotent_on_rejoined_output(self):
        for text in (
            "Æ ha løsst å fær dit.",
            "(hei!) du... @ola 😅",
            "ho gaar, ho skal -- «ja»",
        ):
            once = tokenize(text)
            assert tokenize(" ".join(once)) == once

    @settings(max_examples=100, derandomize=True)
    @given(st.text(alphabet="abcæøå ().,!?@#'😅-", max_size=40))
    def test_idempotence_property(self, text):
        once = tokenize(text)
        assert tokenize(" ".join(once)) == once
        assert all(tok and not any(c.isspace() for c in tok) for tok in once)


def tiny_lexicon():
    return TermLexicon({
        BK: ("jeg har", "hun er"),
        NN: ("eg har",),
        DI: ("æ ska", "eg har", "æ e"),
    })


class TestLexicon:
    def test_terms_must_be_bigrams(self):
        with pytest.raises(LexiconError):
            TermLexicon({BK: ("jeg",)})
        with pytest.raises(LexiconError):
            TermLexicon({BK: ("jeg har en",)})

    def test_duplicate_within_label_rejected(self):
        with pytest.raises(LexiconError):
            TermLexicon({BK: ("jeg har", "jeg har")})

    def test_same_term_under_two_labels_allowed(self):
        lex = tiny_lexicon()
        assert "eg har" in lex.entries[NN]
        assert "eg har" in lex.entries[DI]

    def test_mixed_not_a_lexicon_label(self):
        with pytest.raises(LexiconError):
            TermLexicon({Label.MIXED: ("en to",)})

    def test_file_parsing(self, tmp_path):
        p = tmp_path / "lex.txt"
        p.write_text(
            "# comment\n[bokmal]\njeg har\n\n[dialect]\næ ska  # inline comment\næ ska\n",
            encoding="utf-8",
        )
        lex = load_lexicon(p)
        assert lex.entries[BK] == ("jeg har",)
        assert lex.entries[DI] == ("æ ska",)  # repeated line collapsed

    def test_file_errors(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("[svensk]\n", encoding="utf-8")
        with pytest.raises(LexiconError, match="line 1"):
            load_lexicon(p)
        p.write_text("jeg har\n", encoding="utf-8")
        with pytest.raises(LexiconError, match="before any section"):
            load_lexicon(p)

    def test_bundled_lexicon(self):
        lex = default_lexicon()
        assert set(lex.entries) == {BK, NN, DI}
        assert "jeg har" in lex.entries[BK]
        assert "ho gaar" in lex.entries[NN]
        assert "æ ska" in lex.entries[DI]
        assert "eg har" in lex.entries[NN] and "eg har" in lex.entries[DI]
        assert lex.n_terms > 200


class TestMatchTerms:
    def test_single_dialect_match(self):
        tokens = tokenize("æ ska dra heim no i dag etter jobb hei du")
        assert ("æ ska", DI) in match_terms(tokens, default_lexicon())

    def test_term_under_two_labels_reported_twice(self):
        tokens = tokenize("eg har vore der mange gonger før i livet")
        matches = match_terms(tokens, default_lexicon())
        assert ("eg har", NN) in matches
        assert ("eg har", DI) in matches

    def test_no_match(self):
        tokens = tokenize("hello world nothing matches here at all today friends")
        assert match_terms(tokens, default_lexicon()) == []

    def test_order_first_occurrence_then_label(self):
        lex = tiny_lexicon()
        matches = match_terms(tokenize("æ ska si at eg har rett"), lex)
        assert matches == [("æ ska", DI), ("eg har", NN), ("eg har", DI)]

    def test_each_pair_reported_once(self):
        lex = tiny_lexicon()
        matches = match_terms(tokenize("æ ska gå og æ ska komme"), lex)
        assert matches == [("æ ska", DI)]

    def test_case_invariance(self):
        lex = tiny_lexicon()
        base = "Jeg har aldri sett noe lignende før i dag"
        assert match_terms(tokenize(base), lex) == match_terms(tokenize(base.upper()), lex)

    def test_no_substring_firing(self):
        # "eg har" must not fire inside "legg harde"
        lex = tiny_lexicon()
        assert match_terms(tokenize("vi legg harde planer"), lex) == []


LONG_MATCH = "æ ska dra heim no i dag etter jobb du"  # 10 tokens


class TestFilterCandidates:
    def test_short_text_dropped_even_if_matching(self):
        out = filter_candidates([("a", "æ ska heim")], tiny_lexicon())
        assert len(out) == 0

    def test_long_matching_text_kept_with_terms(self):
        out = filter_candidates([("a", LONG_MATCH)], tiny_lexicon())
        assert len(out) == 1
        assert out[0].matched_terms == ("æ ska",)
        assert out[0].label is None

    def test_long_nonmatching_text_dropped(self):
        out = filter_candidates(
            [("a", "dette er en veldig lang tekst uten noen markører i det hele tatt")],
            tiny_lexicon(),
        )
        assert len(out) == 0

    def test_exact_duplicates_collapsed_first_wins(self):
        out = filter_candidates([("a", LONG_MATCH), ("b", LONG_MATCH)], tiny_lexicon())
        assert [t.id for t in out] == ["a"]

    def test_near_duplicates_both_kept(self):
        other = LONG_MATCH.replace("jobb", "skole")
        out = filter_candidates([("a", LONG_MATCH), ("b", other)], tiny_lexicon())
        assert [t.id for t in out] == ["a", "b"]

    def test_min_tokens_parameter(self):
        out = filter_candidates([("a", "æ ska heim no")], tiny_lexicon(), min_tokens=3)
        assert len(out) == 1
        with pytest.raises(Exception):
            filter_candidates([], tiny_lexicon(), min_tokens=0)

    def test_output_ids_subset_and_term_multiplicity(self):
        stream = [
            ("a", LONG_MATCH),
            ("b", "kort tekst"),
            ("c", "eg har vore der mange gonger før i livet no"),
        ]
        out = filter_candidates(stream, tiny_lexicon())
        assert {t.id for t in out} <= {"a", "b", "c"}
        by_id = {t.id: t for t in out}
        # "eg har" matched under two labels but listed once
        assert by_id["c"].matched_terms == ("eg har",)

    def test_source_passthrough(self):
        out = filter_candidates([("a", LONG_MATCH, "batch-7")], tiny_lexicon())
        assert out[0].source == "batch-7"

    def test_properties_on_kept_tweets(self):
        stream = [(f"t{i}", LONG_MATCH + f" ekstra{i}") for i in range(5)]
        out = filter_candidates(stream, tiny_lexicon(), min_tokens=10)
        assert len(out) == 5
        for tweet in out:
            assert len(tokenize(tweet.text)) >= 10
            assert tweet.matched_terms
