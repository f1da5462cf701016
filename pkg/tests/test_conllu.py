import io
import logging
import random

import pytest
from hypothesis import given, settings, strategies as st

from wordorder.conllu import ConlluError, base_deprel, parse_string, parse_treebank, read_treebank

import synth


def line(*fields):
    return "\t".join(str(f) for f in fields)


def test_minimal_sentence():
    text = line(1, "Mon", "mon", "DET", "_", "_", 2, "det", "_", "_") + "\n" + \
        line(2, "ami", "ami", "NOUN", "_", "_", 0, "root", "_", "_") + "\n\n"
    sents = parse_string(text)
    assert len(sents) == 1
    assert [t.form for t in sents[0].tokens] == ["Mon", "ami"]
    assert sents[0].tokens[0].xpos is None
    assert sents[0].tokens[0].head == 2


def test_comments_attach_to_sentence(french_conllu):
    sents = parse_string(french_conllu)
    assert [s.sent_id for s in sents] == ["fr-1", "fr-2"]
    assert sents[1].text == "Mon appartement ancien"


def test_multiword_and_empty_nodes_set_aside():
    # "du" = "de le", a range line plus its two syntactic words
    text = "\n".join([
        line(1, "Il", "il", "PRON", "_", "_", 2, "nsubj", "_", "_"),
        line(2, "parle", "parler", "VERB", "_", "_", 0, "root", "_", "_"),
        line("3-4", "du", "_", "_", "_", "_", "_", "_", "_", "_"),
        line(3, "de", "de", "ADP", "_", "_", 5, "case", "_", "_"),
        line(4, "le", "le", "DET", "_", "_", 5, "det", "_", "_"),
        line(5, "livre", "livre", "NOUN", "_", "_", 2, "obl", "_", "_"),
        line("5.1", "dit", "dire", "VERB", "_", "_", "_", "_", "2:conj", "_"),
    ]) + "\n\n"
    (sent,) = parse_string(text)
    assert [t.id for t in sent.tokens] == [1, 2, 3, 4, 5]
    assert [t.form for t in sent.tokens] == ["Il", "parle", "de", "le", "livre"]
    assert sent.multiword == [("3-4", "du", "_", "_", "_", "_", "_", "_", "_", "_")]
    assert len(sent.empty_nodes) == 1 and sent.empty_nodes[0][0] == "5.1"


def test_nine_fields_is_an_error():
    good = line(1, "a", "a", "NOUN", "_", "_", 0, "root", "_", "_")
    bad = line(2, "b", "b", "NOUN", "_", "_", 1, "nmod", "_")
    data = (good + "\n" + bad + "\n\n").encode()
    with pytest.raises(ConlluError) as info:
        list(parse_treebank(io.BytesIO(data)))
    assert info.value.line_no == 2
    assert info.value.offset == len(good) + 1
    assert "line 2" in str(info.value)


@pytest.mark.parametrize("field_idx,value", [(0, "x"), (6, "_"), (6, "-1")])
def test_non_numeric_id_or_head(field_idx, value):
    fields = [1, "a", "a", "NOUN", "_", "_", 0, "root", "_", "_"]
    fields[field_idx] = value
    with pytest.raises(ConlluError):
        parse_string(line(*fields) + "\n\n")


def test_dangling_head_skips_sentence(caplog):
    text = "\n".join([
        line(1, "a", "a", "NOUN", "_", "_", 7, "nmod", "_", "_"),
        line(2, "b", "b", "VERB", "_", "_", 0, "root", "_", "_"),
        "",
        line(1, "c", "c", "VERB", "_", "_", 0, "root", "_", "_"),
    ]) + "\n"
    with caplog.at_level(logging.WARNING):
        sents = parse_string(text)
    assert len(sents) == 1
    assert sents[0].tokens[0].form == "c"
    assert "dangling head" in caplog.text


def test_self_head_skips_sentence():
    text = line(1, "a", "a", "NOUN", "_", "_", 1, "root", "_", "_") + "\n\n"
    assert parse_string(text) == []


def test_multiple_blank_lines_and_crlf():
    tok = line(1, "a", "a", "NOUN", "_", "_", 0, "root", "_", "_")
    text = f"{tok}\r\n\r\n\n\n{tok}\r\n"
    assert len(parse_string(text)) == 2


def test_text_stream_accepted(french_conllu):
    assert len(list(parse_treebank(io.StringIO(french_conllu)))) == 2


def test_read_treebank(tmp_path, french_conllu):
    path = tmp_path / "fr_test-ud-test.conllu"
    path.write_text(french_conllu, encoding="utf-8")
    assert len(list(read_treebank(path))) == 2


def test_invalid_utf8():
    with pytest.raises(ConlluError):
        list(parse_treebank(io.BytesIO(b"1\t\xff\ta\tNOUN\t_\t_\t0\troot\t_\t_\n")))


@pytest.mark.parametrize("rel,expected", [
    ("nsubj:pass", "nsubj"), ("amod", "amod"), ("obj:agent", "obj"), ("", ""), ("a:b:c", "a"),
])
def test_base_deprel(rel, expected):
    assert base_deprel(rel) == expected


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=0, max_value=12))
def test_sentence_count_round_trip_and_heads(seed, n):
    rng = random.Random(seed)
    sents = synth.random_treebank(rng, n)
    text = synth.to_conllu(sents)
    parsed = parse_string(text)
    assert len(parsed) == n
    for raw, sent in zip(sents, parsed):
        ids = {t.id for t in sent.tokens}
        assert [(t.id, t.upos, t.head, t.deprel) for t in sent.tokens] == raw
        assert all(t.head == 0 or t.head in ids for t in sent.tokens)
    # pure: same input, same output
    assert parse_string(text) == parsed
