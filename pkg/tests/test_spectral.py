import math

import pytest

from hcircle.errors import ValidationError
from hcircle.geometry import Point
from hcircle.kernels import SmoothedCutoff
from hcircle.spectral import (
    MODULAR_COVOLUME,
    SpectralDatum,
    covolume_quadrature,
    load_spectral_csv,
    main_term,
    modular_constant_datum,
    modular_spectral_data,
    save_spectral_csv,
    smoothed_count_leading,
    validate_spectral_data,
)


def test_datum_validation():
    SpectralDatum(1.0, 3.0 / math.pi)
    SpectralDatum(0.75, 0.1)
    SpectralDatum(0.5 + 4.2j, 0.3)
    with pytest.raises(ValidationError):
        SpectralDatum(0.4, 1.0)
    with pytest.raises(ValidationError):
        SpectralDatum(1.2, 1.0)
    with pytest.raises(ValidationError):
        SpectralDatum(0.6 + 1.0j, 1.0)


def test_validate_data_list():
    validate_spectral_data(modular_spectral_data())
    with pytest.raises(ValidationError):
        validate_spectral_data([SpectralDatum(0.75, 1.0)])
    with pytest.raises(ValidationError):
        validate_spectral_data([modular_constant_datum(), modular_constant_datum()])


def test_main_term_is_three_x():
    data = modular_spectral_data()
    for x in (10.0, 1e3, 1e6):
        assert abs(main_term(x, data).real - 3.0 * x) < 1e-9 * x


def test_main_term_at_the_left_edge():
    assert abs(main_term(2.0, modular_spectral_data()).real - 6.0) < 1e-12


def test_main_term_additive():
    base = modular_spectral_data()
    extra = SpectralDatum(0.75, 0.2, "synthetic")
    x = 50.0
    total = main_term(x, base + [extra])
    assert abs(total - (main_term(x, base) + main_term(x, [extra]))) < 1e-10
    with pytest.raises(ValidationError):
        main_term(10.0, [])


def test_covolume():
    assert abs(covolume_quadrature() - MODULAR_COVOLUME) < 1e-6
    # refinement stays put
    assert abs(covolume_quadrature(panels=36, order=12, y_cap=15.0) - MODULAR_COVOLUME) < 1e-8


def test_csv_round_trip(tmp_path):
    data = [modular_constant_datum(), SpectralDatum(0.75, 0.25 + 0.125j, "synthetic"),
            SpectralDatum(0.5 + 13.78j, 1e-3, "tempered")]
    path = tmp_path / "spectral.csv"
    save_spectral_csv(data, path)
    back = load_spectral_csv(path)
    assert len(back) == 3
    for orig, loaded in zip(data, back):
        assert abs(complex(orig.s) - complex(loaded.s)) < 1e-15
        assert abs(complex(orig.weight) - complex(loaded.weight)) < 1e-15
        assert orig.label == loaded.label


def test_smoothed_leading_torsion_only_ball():
    # smoothing narrow enough that only the two elements fixing i land
    # inside the support: direct sum = 2 k*(0) = 2 / I_dx
    report = smoothed_count_leading(Point(0.0, 1.0), 0.05, 0.01)
    sc = SmoothedCutoff(0.05, 0.01)
    assert abs(report.direct_sum - 2.0 / sc.i_dx) < 1e-12


def test_smoothed_leading_deficit_shrinks():
    z = Point(0.0, 2.0)
    ratios = []
    for x in (1e3, 1e4, 1e5):
        rep = smoothed_count_leading(z, x, x ** 0.75)
        ratios.append(abs(rep.difference) / x)
        assert rep.difference == rep.direct_sum - rep.prediction
    assert ratios[2] < ratios[0]  # trend only


def test_smoothed_leading_extreme_smoothing_corridor():
    # main-term dominance: the smoothed orbit sum tracks 3X with
    # X = 4x + 2 even at the widest admissible smoothing
    x = 1e3
    d = 0.99 * x / math.log(x)
    rep = smoothed_count_leading(Point(0.0, 2.0), x, d)
    main = 3.0 * (4.0 * x + 2.0)
    assert 0.5 * main <= rep.direct_sum <= 1.5 * main
