import numpy as np
import pytest

from factgauge.errors import LexiconError
from factgauge.rng import keyed_rng
from factgauge.taggers import (
    LexiconSet,
    annotate,
    antonym,
    detect_tense,
    load_antonym_dump,
    load_gazetteer,
    load_lexicons,
    load_pronoun_groups,
)


def span_texts(text, spans):
    return [text[s:e] for s, e, *_ in spans]


# ---------------------------------------------------------------- lexicons


def test_bundled_lexicons_load(lexicons):
    assert len(lexicons.pronoun_sets) >= 5
    assert lexicons.antonym_map["good"] == ("bad",)
    assert "bad" in lexicons.antonym_map  # symmetrized on load
    assert lexicons.entity_gazetteer and lexicons.entity_gazetteer["BBC"] == "ORG"


def test_pronoun_groups_file_parsing(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("# comment line\nhe him his his\nshe her her hers\n")
    groups = load_pronoun_groups(path)
    assert groups == (("he", "him", "his", "his"), ("she", "her", "her", "hers"))


def test_pronoun_slot_uses_first_matching_slot(lexicons):
    # "her" fills both the object and dependent-possessive slots of its
    # group; disambiguation picks the first.
    group_idx, slot = lexicons.pronoun_slot("her")
    assert lexicons.pronoun_sets[group_idx][0] == "she"
    assert slot == 1
    assert lexicons.pronoun_slot("theirs") == (
        next(i for i, g in enumerate(lexicons.pronoun_sets) if g[0] == "they"),
        3,
    )
    assert lexicons.pronoun_slot("banana") is None


def test_cross_group_duplicate_pronouns_rejected():
    with pytest.raises(LexiconError, match="two groups"):
        LexiconSet(
            pronoun_sets=(("he", "him"), ("she", "him")),
            antonym_map={},
        )


def test_asymmetric_antonym_map_rejected():
    with pytest.raises(LexiconError, match="not symmetric"):
        LexiconSet(pronoun_sets=(), antonym_map={"hot": ("cold",)})


def test_antonym_dump_parses_pointers_and_skips_headers(tmp_path):
    dump = tmp_path / "data.adj"
    dump.write_text(
        "  1 This header line is copyright text and must be skipped\n"
        "  2 so is this one\n"
        "00000100 00 a 01 bright 0 001 ! 00000200 a 0101 | giving out light\n"
        "00000200 00 a 01 dim 0 001 ! 00000100 a 0101 | not bright\n"
        "00000300 00 a 01 lonely 0 000 | no pointers here\n"
    )
    mapping = load_antonym_dump(dump)
    assert mapping["bright"] == ("dim",)
    assert mapping["dim"] == ("bright",)
    assert "lonely" not in mapping


def test_antonym_dump_multiword_synsets(tmp_path):
    dump = tmp_path / "data.adj"
    dump.write_text(
        "00000100 00 a 02 big 0 large 0 001 ! 00000200 a 0201 | of great size\n"
        "00000200 00 a 01 small 0 001 ! 00000100 a 0102 | opposite pointer\n"
    )
    mapping = load_antonym_dump(dump)
    # pointer 0201 names source word 2 ("large") and target word 1
    assert mapping["large"] == ("small",)
    assert mapping["small"] == ("large",)


def test_antonym_dump_unknown_target_rejected(tmp_path):
    dump = tmp_path / "data.adj"
    dump.write_text("00000100 00 a 01 hot 0 001 ! 09999999 a 0101 | dangling\n")
    with pytest.raises(LexiconError):
        load_antonym_dump(dump)


def test_antonym_dump_malformed_line_rejected(tmp_path):
    dump = tmp_path / "data.adj"
    dump.write_text("00000100 00 a\n")
    with pytest.raises(LexiconError):
        load_antonym_dump(dump)


def test_gazetteer_rejects_bad_rows(tmp_path):
    path = tmp_path / "g.tsv"
    path.write_text("OnlyOneColumn\n")
    with pytest.raises(LexiconError):
        load_gazetteer(path)


def test_load_lexicons_custom_paths(tmp_path):
    pron = tmp_path / "p.txt"
    pron.write_text("he him his his\n")
    anto = tmp_path / "a.adj"
    anto.write_text(
        "00000100 00 a 01 up 0 001 ! 00000200 a 0101 | upward\n"
        "00000200 00 a 01 down 0 001 ! 00000100 a 0101 | downward\n"
    )
    lex = load_lexicons(antonyms=anto, pronouns=pron)
    assert lex.pronoun_sets == (("he", "him", "his", "his"),)
    assert lex.antonym_map["up"] == ("down",)
    # unspecified lexicons still fall back to the bundled files
    assert lex.entity_gazetteer and "BBC" in lex.entity_gazetteer


def test_antonym_draw_is_seed_deterministic(lexicons):
    rng1 = keyed_rng(1, "t")
    rng2 = keyed_rng(1, "t")
    assert antonym("good", lexicons, rng1) == antonym("good", lexicons, rng2) == "bad"
    assert antonym("plutonium", lexicons, keyed_rng(1, "t")) is None


# ---------------------------------------------------------------- tenses


def find_span(text, token):
    start = text.index(token)
    return (start, start + len(token))


@pytest.mark.parametrize(
    "text,verb,tag",
    [
        ("They have finished the job.", "finished", "participle-after-have"),
        ("She has already left town.", "left", "participle-after-have"),
        ("He will bring the files.", "bring", "infinitive-after-modal"),
        ("It could not work.", "work", "infinitive-after-modal"),
        ("She is running fast.", "running", "gerund/progressive"),
        ("They walked home.", "walked", "past"),
        ("He opposes the plan.", "opposes", "present-simple-3rd"),
        ("We pass the test.", "pass", "present-simple"),
        ("They run daily.", "run", "present-simple"),
    ],
)
def test_detect_tense_patterns(text, verb, tag):
    assert detect_tense(find_span(text, verb), text) == tag


def test_detect_tense_rejects_nonspan():
    with pytest.raises(ValueError):
        detect_tense((2, 5), "They walked home.")


# ---------------------------------------------------------------- annotate


def test_annotate_gazetteer_beats_capitalization(lexicons):
    text = "Justin Trudeau visited the BBC offices in Ottawa."
    ann = annotate(text, lexicons)
    ents = {text[s:e]: lab for s, e, lab in ann.entity_spans}
    assert ents["Justin Trudeau"] == "PERSON"
    assert ents["BBC"] == "ORG"
    assert ents["Ottawa"] == "GPE"


def test_annotate_joins_capitalized_runs(lexicons):
    text = "The deal involves Harlan Voss and the Meridian Group today."
    ann = annotate(text, lexicons)
    surfaces = span_texts(text, ann.entity_spans)
    assert "Harlan Voss" in surfaces
    assert "Meridian Group" in surfaces


def test_annotate_skips_lone_sentence_initial_capital(lexicons):
    ann = annotate("Everyone went home. Nobody stayed.", lexicons)
    assert ann.entity_spans == ()


def test_annotate_pronouns_outside_entities(lexicons):
    text = "She told him the result."
    ann = annotate(text, lexicons)
    assert span_texts(text, ann.pronoun_spans) == ["She", "him"]


def test_annotate_be_forms_always_verbs(lexicons):
    text = "The figures are wrong and the total is high."
    ann = annotate(text, lexicons)
    verbs = span_texts(text, ann.verb_tokens)
    assert "are" in verbs and "is" in verbs


def test_annotate_copula_complement_not_a_verb(lexicons):
    # "ready" after "is" must not be tagged as a verb
    ann = annotate("The report is ready now.", lexicons)
    text = "The report is ready now."
    assert "ready" not in span_texts(text, ann.verb_tokens)


def test_annotate_adjectives_from_antonym_map(lexicons):
    text = "The new policy had a positive effect on the old market."
    ann = annotate(text, lexicons)
    adjectives = span_texts(text, ann.adjective_tokens)
    assert set(adjectives) == {"new", "positive", "old"}


def test_annotate_suffix_verbs(lexicons):
    text = "The board approved the merger while traders were watching closely."
    ann = annotate(text, lexicons)
    verbs = span_texts(text, ann.verb_tokens)
    assert "approved" in verbs and "watching" in verbs


def test_annotate_empty_text_rejected(lexicons):
    with pytest.raises(ValueError):
        annotate("", lexicons)


def test_toy_corpus_annotations_match_live_tagger(toy_corpus, lexicons):
    # The frozen corpus annotations were produced by this tagger; drift in
    # either direction should fail loudly.
    for doc_id in toy_corpus.ids():
        ref = toy_corpus.references[doc_id]
        assert annotate(ref.text, lexicons) == ref.annotations, doc_id
        doc = toy_corpus.documents[doc_id]
        assert annotate(doc.text, lexicons) == doc.annotations, doc_id
