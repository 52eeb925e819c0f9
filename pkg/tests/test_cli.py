"""Command line round-trips, outputs, and exit codes."""

from fractions import Fraction

import numpy as np
import pytest

from syncgames.cli import (
    main,
    parse_game,
    parse_realization,
    render_game,
    render_realization,
    _read_text,
)
from syncgames.errors import ParseError

GAME_TEXT = """\
# toy game
game toy
inputs 2
outputs 2
allow 1 1 1 1
allow 1 1 2 2
allow 1 2 1 1
allow 2 2 1 1
allow 2 2 2 2
density uniform
"""


def test_parse_game_basic():
    gf = parse_game(GAME_TEXT)
    assert gf.name == "toy"
    assert gf.game.n_inputs == 2 and gf.game.n_outputs == 2
    assert set(gf.game.winning_pairs(0, 1)) == {(0, 0)}
    assert gf.density.weights[0][0] == Fraction(1, 4)


def test_parse_render_identity_bundled_games():
    for name in ("example1.game", "example2.game"):
        gf = parse_game(_read_text(name))
        again = parse_game(render_game(gf))
        assert again == gf
        assert render_game(again) == render_game(gf)


def test_parse_game_explicit_density():
    text = GAME_TEXT.replace(
        "density uniform",
        "density 1 1 1/2\ndensity 1 2 1/4\ndensity 2 1 1/4",
    )
    gf = parse_game(text)
    assert gf.density.weights[0][0] == Fraction(1, 2)
    assert gf.density.weights[1][1] == Fraction(0)


def test_parse_game_errors_carry_line_numbers():
    bad = GAME_TEXT.replace("allow 1 1 1 1", "allow 1 1 1")
    with pytest.raises(ParseError) as info:
        parse_game(bad)
    assert "line 5" in str(info.value)


def test_parse_game_rejects_unnormalized_density():
    text = GAME_TEXT.replace("density uniform", "density 1 1 1/2")
    with pytest.raises(Exception) as info:
        parse_game(text)
    assert "sum" in str(info.value)


def test_realization_render_roundtrip():
    r = parse_realization(_read_text("witness712.real"))
    r2 = parse_realization(render_realization(r))
    for b1, b2 in zip(r.blocks, r2.blocks, strict=True):
        assert b1.weight == b2.weight
        for row1, row2 in zip(b1.projections, b2.projections, strict=True):
            for p1, p2 in zip(row1, row2, strict=True):
                assert np.array_equal(p1, p2)


def test_cli_value_loc(capsys):
    assert main(["value", "example1.game", "--class", "loc", "--no-timing"]) == 0
    out = capsys.readouterr().out
    assert "value = 3/4" in out
    assert "witness = 1 1" in out


def test_cli_value_ns(capsys):
    assert main(["value", "example2.game", "--class", "ns", "--no-timing"]) == 0
    out = capsys.readouterr().out
    assert "value = 2/3" in out
    assert "certificate = verified" in out


def test_cli_value_qlower(capsys):
    code = main(
        [
            "value",
            "example2.game",
            "--class",
            "q-lower",
            "--dim",
            "2",
            "--restarts",
            "5",
            "--seed",
            "7",
            "--no-timing",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    value = float(out.split("value = ")[1].splitlines()[0])
    assert value >= 7 / 12 - 1e-6


def test_cli_value_qc_upper(capsys):
    code = main(
        ["value", "example1.game", "--class", "qc-upper", "--level", "1", "--no-timing"]
    )
    assert code == 0
    out = capsys.readouterr().out
    bound = float(out.split("bound = ")[1].splitlines()[0])
    assert 3 / 4 - 1e-6 <= bound <= 3 / 4 + 1e-4
    assert "status = optimal" in out


def test_cli_product_roundtrip(tmp_path, capsys):
    out_path = tmp_path / "sq.game"
    code = main(
        ["product", "example1.game", "example1.game", str(out_path), "--name", "sq"]
    )
    assert code == 0
    capsys.readouterr()
    code = main(["value", str(out_path), "--class", "loc", "--no-timing"])
    assert code == 0
    assert "value = 9/16" in capsys.readouterr().out


def test_cli_check_realization(capsys):
    code = main(["check-realization", "example2.game", "witness712.real"])
    assert code == 0
    out = capsys.readouterr().out
    assert "perfect = no" in out
    assert "passed = yes" in out
    value = float(out.split("value = ")[1].splitlines()[0])
    assert abs(value - 7 / 12) < 1e-12


def test_cli_missing_file_exit_code(capsys):
    assert main(["value", "/no/such/file.game", "--class", "loc"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_parse_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.game"
    p.write_text("game bad\ninputs 2\noutputs 2\nallow 1 1 1 2\ndensity uniform\n")
    assert main(["value", str(p), "--class", "loc"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_not_converged_exit_code(tmp_path, capsys):
    p = tmp_path / "tiny.game"
    p.write_text("game tiny\ninputs 1\noutputs 2\nallow 1 1 1 1\ndensity uniform\n")
    code = main(
        ["value", str(p), "--class", "qc-upper", "--max-iters", "1", "--tol", "1e-14"]
    )
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_cli_verify_fast_subset(capsys):
    code = main(["verify", "--skip", "exact", "--skip", "sdp", "--no-timing"])
    out = capsys.readouterr().out
    assert code == 0
    assert "result = pass" in out
    assert "check seesaw-example2 = pass" in out
    assert "check ns-certificates = skipped" in out
