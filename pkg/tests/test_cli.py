"""End-to-end tests for the command-line interface."""

import json

import pytest

from atlh.cegm import load_model
from atlh.cli import main
from atlh.scenarios import gen_referendum_single, infoset_table_csv, threeballot_infosets
from atlh.cegm import save_model

MICRO = """
agents: a
states: s0 s1 b
init: s0
actions a: x y
obs a: s0 ~ s1
trans s0 (x) -> s1
trans s0 (y) -> b
trans s1 (x) -> b
trans s1 (y) -> s1
trans b (x) -> b
trans b (y) -> b
prop p: s0 s1
"""


@pytest.fixture
def fig1_path(tmp_path):
    path = tmp_path / "fig1.cegm"
    path.write_text(save_model(gen_referendum_single()), encoding="utf-8")
    return str(path)


@pytest.fixture
def micro_path(tmp_path):
    path = tmp_path / "micro.cegm"
    path.write_text(MICRO, encoding="utf-8")
    return str(path)


def test_gen_fig1_round_trips(capsys):
    assert main(["gen", "fig1"]) == 0
    text = capsys.readouterr().out
    model = load_model(text)
    assert model.states == ("s0", "s1", "s2")
    assert text == save_model(gen_referendum_single())


def test_gen_to_file(tmp_path, capsys):
    out = tmp_path / "m.cegm"
    assert main(["gen", "Mn", "--n", "3", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert len(load_model(out.read_text(encoding="utf-8")).states) == 8


def test_gen_errors(capsys):
    assert main(["gen", "Mn"]) == 2
    assert main(["gen", "Nnj", "--n", "2", "--j", "0"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err
    assert "j must be between 1 and 3" in err


def test_check_verdict_and_witness(fig1_path, capsys):
    code = main(
        [
            "check",
            "--model",
            fig1_path,
            "--formula",
            "<v> F (Voted & V_A & G !(K[c] V_A | K[c] !V_A))",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "result: true" in out
    assert "witness: v: s0=voteA" in out


def test_check_false_exit_code(tmp_path, capsys):
    m1 = tmp_path / "m1.cegm"
    main(["gen", "m1", "--out", str(m1)])
    code = main(
        ["check", "--model", str(m1), "--state", "s1", "--formula", "H[c] >= 2 {V_A, V_B}"]
    )
    assert code == 1
    assert "result: false" in capsys.readouterr().out


def test_check_trivial_true(fig1_path, capsys):
    assert main(["check", "--model", fig1_path, "--formula", "true"]) == 0
    out = capsys.readouterr().out
    assert "result: true" in out
    assert "witness" not in out


def test_check_state_default_is_initial(fig1_path, capsys):
    assert main(["check", "--model", fig1_path, "--formula", "!Voted"]) == 0
    assert "state: s0" in capsys.readouterr().out


def test_check_formula_source_ambiguity(fig1_path, tmp_path, capsys):
    ffile = tmp_path / "f.atlh"
    ffile.write_text("true", encoding="utf-8")
    code = main(
        ["check", "--model", fig1_path, "--formula", "true", "--formula-file", str(ffile)]
    )
    assert code == 2
    assert "pick one" in capsys.readouterr().err
    assert main(["check", "--model", fig1_path]) == 2
    code = main(["check", "--model", fig1_path, "--formula-file", str(ffile)])
    assert code == 0


def test_check_error_paths(fig1_path, capsys):
    assert main(["check", "--model", "/nonexistent.cegm", "--formula", "true"]) == 2
    assert main(["check", "--model", fig1_path, "--formula", "p &"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err
    assert main(["check", "--model", fig1_path, "--formula", "true", "--state", "zz"]) == 2


def test_check_dump_labels(fig1_path, capsys):
    code = main(
        ["check", "--model", fig1_path, "--formula", "Voted | V_A", "--dump-labels"]
    )
    assert code == 1
    out = capsys.readouterr().out
    assert "label V_A: s1" in out
    assert "label Voted: s1 s2" in out
    assert "label Voted | V_A: s1 s2" in out


def test_check_json_lines(fig1_path, capsys):
    code = main(
        [
            "check",
            "--model",
            fig1_path,
            "--formula",
            "<v> X Voted",
            "--dump-labels",
            "--output",
            "json-lines",
        ]
    )
    assert code == 0
    events = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    kinds = [e["event"] for e in events]
    assert kinds[0] == "verdict"
    assert events[0]["result"] is True
    assert events[0]["state"] == "s0"
    assert "witness" in kinds
    witness = events[kinds.index("witness")]
    assert witness["coalition"] == ["v"]
    assert witness["actions"]["v"]["s0"] == "voteA"
    labels = [e for e in events if e["event"] == "label"]
    assert {"event": "label", "formula": "Voted", "states": ["s1", "s2"]} in labels


def test_check_csv_output(fig1_path, capsys):
    code = main(
        ["check", "--model", fig1_path, "--formula", "Voted", "--output", "csv"]
    )
    assert code == 1
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "state,formula,result"
    assert lines[1] == "s0,Voted,false"


def test_check_strategy_flags(micro_path):
    assert main(["check", "--model", micro_path, "--formula", "<a> G p"]) == 1
    assert (
        main(
            ["check", "--model", micro_path, "--formula", "<a> G p", "--strategy-mode", "Ir"]
        )
        == 0
    )
    assert (
        main(
            [
                "check",
                "--model",
                micro_path,
                "--state",
                "s1",
                "--formula",
                "<> X !p",
                "--scope",
                "subjective",
            ]
        )
        == 0
    )


def test_translate_k2h(capsys):
    assert main(["translate", "--dir", "k2h", "--formula", "K[a] p"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "p & H[a] = log(1) {p}"
    assert out[1] == "input length: 2"
    assert out[2] == "output length: 4"


def test_translate_h2k_and_identity(capsys):
    assert main(["translate", "--dir", "h2k", "--formula", "H[a] = log(3) {p, q}"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1] == "input length: 3"
    assert out[2].startswith("output length:")

    assert main(["translate", "--dir", "h2k", "--formula", "<v> F (p | !q)"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "<v> F (p | !q)"


def test_translate_cap_error(capsys):
    code = main(
        [
            "translate",
            "--dir",
            "h2k",
            "--formula",
            "H[a] = log(7) {p, q, r, s}",
            "--cap-nodes",
            "100",
        ]
    )
    assert code == 2
    assert "cap" in capsys.readouterr().err


def test_translate_json_output(capsys):
    assert (
        main(
            ["translate", "--dir", "k2h", "--formula", "K[a] p", "--output", "json-lines"]
        )
        == 0
    )
    event = json.loads(capsys.readouterr().out)
    assert event["event"] == "translation"
    assert event["output"] == "p & H[a] = log(1) {p}"
    assert event["input_length"] == 2
    assert event["output_length"] == 4


def test_experiment_succinctness(capsys):
    assert main(["experiment", "succinctness", "--nmax", "3"]) == 0
    first = capsys.readouterr().out.splitlines()
    assert first[0] == "n,len_phi_n,len_translated,fsg_min,mel_min,wallclock_ms"
    assert len(first) == 4
    for line in first[1:]:
        n, len_phi, len_tr, *_ = line.split(",")
        assert int(len_phi) == int(n) + 1
        assert int(len_tr) >= 2 ** int(n)
    row3 = first[3].split(",")
    assert row3[3] == "" and row3[4] == ""

    assert main(["experiment", "succinctness", "--nmax", "3"]) == 0
    second = capsys.readouterr().out.splitlines()
    strip = lambda lines: [l.rsplit(",", 1)[0] for l in lines]
    assert strip(first) == strip(second)


def test_experiment_threeballot_table(capsys):
    assert main(["experiment", "threeballot-table"]) == 0
    text = capsys.readouterr().out
    assert "Vote = ab, BS = {BB, FB, BF}" in text
    assert len([l for l in text.splitlines() if " | " in l]) == 21

    assert main(["experiment", "threeballot-table", "--csv"]) == 0
    assert capsys.readouterr().out.strip() == infoset_table_csv(threeballot_infosets())


def test_experiment_translation_equivalence(capsys):
    assert main(["experiment", "translation-equivalence", "--samples", "5", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert first.strip().endswith("mismatches: 0")
    assert len(first.splitlines()) == 6

    main(["experiment", "translation-equivalence", "--samples", "5", "--seed", "7"])
    assert capsys.readouterr().out == first

    main(["experiment", "translation-equivalence", "--samples", "5", "--seed", "8"])
    assert capsys.readouterr().out != first


def test_color_toggle(fig1_path, capsys, monkeypatch):
    monkeypatch.setenv("ATLH_MC_COLOR", "1")
    main(["check", "--model", fig1_path, "--formula", "p &"])
    assert "\x1b[31m" in capsys.readouterr().err
    monkeypatch.setenv("ATLH_MC_COLOR", "0")
    main(["check", "--model", fig1_path, "--formula", "p &"])
    assert "\x1b[" not in capsys.readouterr().err


def test_flag_validation(capsys):
    assert main(["check", "--model", "x", "--formula", "true", "--threads", "0"]) == 2
    assert main(["translate", "--dir", "k2h", "--formula", "p", "--cap-nodes", "0"]) == 2
