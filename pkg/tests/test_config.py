import math
import textwrap

import numpy as np
import pytest

from lorsolve import (
    BUNDLED_INSTANCES,
    ConfigError,
    SampledFn,
    bundled_instance_path,
    load_config,
    load_instance,
)

MINIMAL = textwrap.dedent("""\
    [instance]
    name = mini

    [domain]
    boxes = 0, 1

    [grid]
    m = 64

    [young]
    family = power
    m = 2.0

    [constants]
    K = 2
    L = 1
    alpha = 0.25

    [h0]
    expr = 1

    [map1]
    branch1 = 0, 0.5, 2*x, 2
    branch2 = 0.5, 1, 2*x - 1, 2

    [coeff1]
    expr = 0.25
    """)


class TestBundled:
    def test_names(self):
        assert BUNDLED_INSTANCES == ("doubling", "twobranch", "linear_h0")

    @pytest.mark.parametrize("name", BUNDLED_INSTANCES)
    def test_all_load(self, name):
        inst, oracle = load_instance(bundled_instance_path(name))
        assert inst.label == name
        assert "h0_lorentz_norm" in oracle

    def test_doubling_oracle_values(self):
        inst, oracle = load_instance(bundled_instance_path("doubling"))
        assert oracle["solution_constant"] == pytest.approx(4.0 / 3.0,
                                                            rel=1e-15)
        assert inst.norm(inst.h0) == pytest.approx(
            oracle["h0_lorentz_norm"], rel=1e-12
        )

    def test_unknown_bundled_name(self):
        with pytest.raises(ConfigError):
            bundled_instance_path("missing")


class TestLoadInstance:
    def test_from_text(self):
        inst, oracle = load_instance(MINIMAL)
        assert inst.m == 64
        assert inst.n_maps == 1
        assert inst.alpha == 0.25
        assert oracle == {}
        assert inst.label == "mini"

    def test_grid_override(self):
        inst, _ = load_instance(MINIMAL, grid=128)
        assert inst.m == 128

    def test_psi_override(self):
        inst, _ = load_instance(MINIMAL, psi_param=3.0)
        assert inst.psi_label == "power[m=3]"

    def test_from_path_with_label_fallback(self, tmp_path):
        p = tmp_path / "renamed_case.cfg"
        p.write_text(MINIMAL.replace("[instance]\nname = mini\n\n", ""))
        inst, _ = load_instance(p)
        assert inst.label == "renamed_case"

    def test_vector_components(self):
        text = MINIMAL.replace("expr = 1\n", "components = 1; 0; 0\n", 1)
        inst, _ = load_instance(text)
        assert inst.h0.is_vector
        assert inst.h0.target_dim == 3
        assert np.all(inst.h0.values[:, 0] == 1.0)

    def test_h0_from_csv(self, tmp_path):
        from lorsolve import Domain

        f = SampledFn.from_callable(Domain.unit_interval(), 64,
                                    lambda x: x * 2.0)
        csv_path = tmp_path / "h0.csv"
        csv_path.write_text(f.csv_text())
        cfg = tmp_path / "case.cfg"
        cfg.write_text(MINIMAL.replace("expr = 1\n", "csv = h0.csv\n", 1))
        inst, _ = load_instance(cfg)
        assert np.array_equal(inst.h0.values, f.values)

    def test_expression_h0(self):
        text = MINIMAL.replace("expr = 1\n", "expr = x^2\n", 1)
        inst, _ = load_instance(text)
        mid0 = inst.h0.midpoints[0, 0]
        assert inst.h0.values[0] == mid0**2


class TestRejections:
    def test_empty(self):
        with pytest.raises(ConfigError, match="empty"):
            load_instance("\n")

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_instance("no_such_file.cfg")

    def test_missing_section(self):
        with pytest.raises(ConfigError, match=r"\[grid\]"):
            load_instance(MINIMAL.replace("[grid]\nm = 64\n", ""))

    def test_bad_float(self):
        with pytest.raises(ConfigError, match="alpha"):
            load_instance(MINIMAL.replace("alpha = 0.25", "alpha = wide"))

    def test_branch_needs_four_fields(self):
        with pytest.raises(ConfigError, match="branch"):
            load_instance(MINIMAL.replace(
                "branch1 = 0, 0.5, 2*x, 2", "branch1 = 0, 0.5, 2*x"))

    def test_noncontiguous_maps(self):
        text = MINIMAL.replace("[map1]", "[map3]").replace("[coeff1]",
                                                           "[coeff3]")
        with pytest.raises(ConfigError, match="map"):
            load_instance(text)

    def test_coeff_without_map(self):
        text = MINIMAL + "\n[coeff2]\nexpr = 0.1\n"
        with pytest.raises(ConfigError, match="coeff"):
            load_instance(text)

    def test_map_without_coeff(self):
        text = MINIMAL.replace("[coeff1]\nexpr = 0.25\n", "")
        with pytest.raises(ConfigError, match="coeff"):
            load_instance(text)

    def test_h0_requires_exactly_one_source(self):
        text = MINIMAL.replace("expr = 1\n", "expr = 1\ncsv = also.csv\n", 1)
        with pytest.raises(ConfigError, match="h0"):
            load_instance(text)

    def test_monomial_rejected_for_solving(self):
        text = MINIMAL.replace("family = power", "family = monomial")
        with pytest.raises(ConfigError, match="admissible|power"):
            load_instance(text, require_admissible=True)

    def test_oracle_must_be_numeric(self):
        text = MINIMAL + "\n[oracle]\nsolution_constant = approx\n"
        with pytest.raises(ConfigError, match="oracle"):
            load_instance(text)


class TestLoadConfigRaw:
    def test_inline_comments_stripped(self):
        text = MINIMAL.replace("m = 64", "m = 64  # cells")
        raw = load_config(text)
        assert raw["m"] == 64

    def test_oracle_floats(self):
        text = MINIMAL + "\n[oracle]\nsolution_constant = 1.25\n"
        raw = load_config(text)
        assert raw["oracle"] == {"solution_constant": 1.25}
