"""File formats: binary fields, structure/rule text files, tree grammar,
bundles with manifests."""
import os

import numpy as np
import pytest

from regpara.bundles import (
    Config,
    read_bracket_bundle,
    read_config,
    read_model_bundle,
    write_bracket_bundle,
    write_config,
    write_model_bundle,
)
from regpara.grid import Field, Grid, read_field, write_field
from regpara.library import RULES, structure
from regpara.norms import synthesize
from regpara.structure_io import (
    FileFormatError,
    read_rule,
    read_structure,
    write_rule,
    write_structure,
)
from regpara.trees import TreeParseError, parse_tree

from conftest import build_random_model


class TestFieldFormat:
    def test_round_trip(self, grid256, tmp_path):
        f = synthesize(0.5, 1, grid256)
        p = tmp_path / "u.fld"
        write_field(p, f)
        g = read_field(p)
        assert g.grid == grid256
        assert np.array_equal(g.values, f.values)

    def test_layout(self, tmp_path):
        grid = Grid(1, 8, 1.0)
        f = Field(grid, np.arange(8, dtype=float))
        p = tmp_path / "u.fld"
        write_field(p, f)
        raw = p.read_bytes()
        assert raw[:4] == b"RPF1"
        # magic, u32 dim, u32 n, f64 box, then 8 little-endian f64 samples
        assert len(raw) == 4 + 4 + 4 + 8 + 8 * 8
        assert np.frombuffer(raw[20:], dtype="<f8")[3] == 3.0

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.fld"
        p.write_bytes(b"NOPE" + b"\0" * 64)
        with pytest.raises(ValueError) as err:
            read_field(p)
        assert "magic" in str(err.value)


class TestStructureFiles:
    @pytest.mark.parametrize("name", ["toy", "bhz", "twonoise"])
    def test_round_trip_and_determinism(self, name, tmp_path):
        S = structure(name)
        p = tmp_path / "s1.txt"
        write_structure(p, S)
        S2 = read_structure(p)
        assert S2.plus_gens == S.plus_gens
        assert S2.base_gens == S.base_gens
        assert S2.dplus_table == S.dplus_table
        assert S2.delta_table == S.delta_table
        p2 = tmp_path / "s2.txt"
        write_structure(p2, S2)
        assert p.read_bytes() == p2.read_bytes()

    def test_rule_reference(self, tmp_path):
        write_rule(tmp_path / "toy.rule", RULES["toy"])
        (tmp_path / "ref.txt").write_text("rule toy.rule noncanonical\n")
        S = read_structure(tmp_path / "ref.txt")
        want = structure("toy", noncanonical=True)
        assert S.delta_table == want.delta_table

    def test_error_carries_line_number(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("dim 1\ncutoff 2\ngen a plus nonsense\n")
        with pytest.raises(FileFormatError) as err:
            read_structure(p)
        assert err.value.line == 3

    def test_unknown_generator_in_table(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("dim 1\ncutoff 2\ngen a plus 1/2\ndplus a = b (x) 1\n")
        with pytest.raises(FileFormatError) as err:
            read_structure(p)
        assert "unknown plus-generator" in str(err.value)

    def test_handwritten_structure(self, tmp_path):
        p = tmp_path / "hand.txt"
        p.write_text(
            "dim 1\n"
            "cutoff 2\n"
            "gen u base -1/2\n"
            "gen J plus 3/2\n"
            "dplus J = J (x) 1 + 1 (x) J + 1/2 * X(1) (x) J\n"
            "delta u = u (x) 1\n"
        )
        S = read_structure(p)
        assert S.plus_gens["J"] == 3 / 2
        rep = S.check_assumptions()
        assert not rep.c_ok  # D^1 J = J/2 is not a basis generator


class TestRuleFiles:
    def test_round_trip(self, tmp_path):
        for name, rule in RULES.items():
            p = tmp_path / f"{name}.rule"
            write_rule(p, rule)
            back = read_rule(p)
            assert back.noises == rule.noises
            assert back.kernels == rule.kernels
            assert back.products == rule.products
            assert back.polybound == rule.polybound
            assert back.max_e == rule.max_e

    def test_unknown_edge_type_in_product(self, tmp_path):
        p = tmp_path / "bad.rule"
        p.write_text("dim 1\ncutoff 1\nnoise xi -5/8\nallow zz\n")
        with pytest.raises(FileFormatError):
            read_rule(p)

    def test_bad_rational(self, tmp_path):
        p = tmp_path / "bad.rule"
        p.write_text("dim 1\ncutoff 1\nnoise xi -5//8\n")
        with pytest.raises(FileFormatError) as err:
            read_rule(p)
        assert err.value.line == 3


class TestTreeGrammar:
    def test_error_positions(self):
        with pytest.raises(TreeParseError) as err:
            parse_tree("I[t;(0)](X(1)*I[xi;0](1))", 1)
        assert err.value.line == 1
        assert err.value.col > 10

    def test_dimension_mismatch(self):
        with pytest.raises(TreeParseError):
            parse_tree("X(1,0)", 1)


class TestBundles:
    def test_model_bundle_round_trip(self, toy_structure, tmp_path):
        grid = Grid(1, 64, np.pi)
        cfg = Config(n=64)
        model, _gb, _pib = build_random_model(toy_structure, grid, seed=5)
        root = tmp_path / "model"
        write_model_bundle(root, model, cfg)
        back, cfg2 = read_model_bundle(root)
        assert cfg2.n == 64
        for n, v in model.g.values.items():
            assert np.array_equal(back.g.values[n], v)
        for n, v in model.pi.items():
            assert np.array_equal(back.pi[n], v)

    def test_manifest_detects_tampering(self, toy_structure, tmp_path):
        grid = Grid(1, 64, np.pi)
        model, _gb, _pib = build_random_model(toy_structure, grid, seed=5)
        root = tmp_path / "model"
        write_model_bundle(root, model, Config(n=64))
        victim = next(
            os.path.join(root, "g", f)
            for f in os.listdir(os.path.join(root, "g"))
        )
        data = bytearray(open(victim, "rb").read())
        data[-1] ^= 0xFF
        open(victim, "wb").write(bytes(data))
        with pytest.raises(ValueError) as err:
            read_model_bundle(root)
        assert "hash mismatch" in str(err.value)

    def test_bracket_bundle(self, toy_structure, tmp_path):
        grid = Grid(1, 64, np.pi)
        named = {"a": synthesize(0.5, 1, grid), "b": synthesize(-0.5, 2, grid)}
        root = tmp_path / "brackets"
        write_bracket_bundle(root, toy_structure, named, Config(n=64),
                             extra={"gamma.txt": "9/8"})
        back, cfg = read_bracket_bundle(root)
        assert set(back) == {"a", "b"}
        assert np.array_equal(back["a"].values, named["a"].values)
        assert (root / "gamma.txt").read_text().strip() == "9/8"

    def test_config_round_trip(self, tmp_path):
        cfg = Config(n=128, seed=9, tol_slope=0.25, fit_lo=2, fit_hi=5)
        p = tmp_path / "config.txt"
        write_config(p, cfg)
        back = read_config(p)
        assert back == cfg
        assert back.window() == (2, 5)

    def test_unknown_config_key(self, tmp_path):
        p = tmp_path / "config.txt"
        p.write_text("bogus=1\n")
        with pytest.raises(ValueError):
            read_config(p)
