import math
import random
from fractions import Fraction

import pytest

from abtqft.compare import (
    E8_ROWS,
    PhaseTable,
    build_phase_table,
    cs_closed,
    default_corpus,
    equivalence_ratio,
    load_fixture_table,
    random_degenerate,
    random_nondegenerate,
    verify_reciprocity_dt,
    verify_reciprocity_degenerate,
)
from abtqft.errors import DegenerateMatrix, InconsistentPhase, ZeroDenominator
from abtqft.intlinalg import IntSymMatrix, regular_decomposition
from abtqft.numeric import UnitPhase
from abtqft.surgery import SurgeryPresentation, rt_raw_closed

LEVELS = (2, 4, 6, 8)


def sym(rows):
    return IntSymMatrix.from_rows(rows)


E8 = sym([list(r) for r in E8_ROWS])


# ---------------------------------------------------------------------------
# Torsion-formula invariant

@pytest.mark.parametrize("k", LEVELS)
def test_cs_closed_sphere(k):
    res = cs_closed(sym([[1]]), k)
    assert res.m_exponent == Fraction(-1, 2)
    assert res.torsion_order == 1
    assert abs(res.value - 1 / math.sqrt(k)) < 1e-12


@pytest.mark.parametrize("k", LEVELS)
def test_cs_closed_zero_framing(k):
    res = cs_closed(sym([[0]]), k)
    assert res.m_exponent == 0
    assert abs(res.value - 1) < 1e-12


def test_cs_closed_vanishing_gauss_sum():
    res = cs_closed(sym([[2]]), 2)
    assert res.torsion_order == 2
    assert abs(res.value) < 1e-12


def test_cs_closed_value_decomposition():
    res = cs_closed(sym([[3]]), 2)
    assert res.torsion_order == 3
    assert abs(res.value - float(2) ** float(res.m_exponent) * res.gauss) < 1e-12


# ---------------------------------------------------------------------------
# Equivalence ratios

@pytest.mark.parametrize("k", (2, 4))
def test_ratio_examples(k):
    for rows, sigma in (([[1]], 1), ([[0]], 0)):
        ratio, sigma_reg = equivalence_ratio(sym(rows), k)
        assert abs(ratio - 1) < 1e-10
        assert sigma_reg == sigma
    ratio, sigma_reg = equivalence_ratio(E8, k)
    assert abs(ratio - 1) < 1e-9
    assert sigma_reg == 8


def test_ratio_skips_vanishing_gauss_sum():
    with pytest.raises(ZeroDenominator):
        equivalence_ratio(sym([[2]]), 2)


def test_two_sided_zero_when_gauss_sum_vanishes():
    # both routes vanish together; tested instead of the ratio
    rt = rt_raw_closed(SurgeryPresentation.closed(sym([[2]])), 2)
    cs = cs_closed(sym([[2]]), 2).value
    assert abs(rt) < 1e-10 and abs(cs) < 1e-10


def test_default_convention_gives_unit_ratio_everywhere():
    rng = random.Random(61)
    from abtqft.surgery import random_symmetric_matrix

    checked = 0
    while checked < 80:
        L = random_symmetric_matrix(rng, rng.randint(1, 4), 4)
        k = rng.choice(LEVELS)
        try:
            ratio, _ = equivalence_ratio(L, k)
        except ZeroDenominator:
            continue
        assert abs(ratio - 1) < 1e-7
        checked += 1


def test_positive_exponent_convention_is_signature_inconsistent():
    # Same signature class, different ratios: the positive-exponent reading
    # of the torsion sum admits no signature-indexed phase table.
    r3, s3 = equivalence_ratio(sym([[3]]), 2, convention="plus")
    r5, s5 = equivalence_ratio(sym([[5]]), 2, convention="plus")
    assert s3 == s5 == 1
    assert abs(r3 + 1) < 1e-10
    assert abs(r5 - 1) < 1e-10
    with pytest.raises(InconsistentPhase):
        build_phase_table([(sym([[3]]), 2), (sym([[5]]), 2)],
                          convention="plus")


def test_magnitude_matches_on_degenerate_presentations():
    rng = random.Random(67)
    for _ in range(50):
        L = random_degenerate(rng)
        k = rng.choice((2, 4))
        rt = rt_raw_closed(SurgeryPresentation.closed(L), k)
        cs = cs_closed(L, k)
        expected = float(k) ** float(cs.m_exponent) * abs(cs.gauss)
        assert abs(abs(rt) - expected) < 1e-8


# ---------------------------------------------------------------------------
# Phase table

def test_phase_table_classic_corpus():
    corpus = [(sym(rows), k)
              for rows in ([[1]], [[-1]], [[0]], [[1, 0], [0, 1]])
              for k in (2, 4)]
    corpus.append((E8, 2))
    table = build_phase_table(corpus)
    assert table.mapping[0] == UnitPhase(Fraction(0))
    assert table.mapping[1] == UnitPhase(Fraction(0))
    assert table.skipped == 0
    assert table.max_deviation < 1e-7


def test_phase_table_singleton_corpus():
    table = build_phase_table([(sym([[1]]), 2)])
    assert set(table.mapping) == {1}


def test_phase_table_logs_skipped_vanishing_entries():
    table = build_phase_table([(sym([[1]]), 2), (sym([[2]]), 2)])
    assert table.skipped == 1
    assert table.corpus_size == 2


def test_phase_table_json_round_trip():
    table = build_phase_table([(sym([[1]]), 2), (sym([[0]]), 4)])
    clone = PhaseTable.from_json(table.to_json())
    assert clone.same_phases(table)
    assert clone.corpus_size == table.corpus_size


def test_default_corpus_is_deterministic_and_spans_classes():
    a = default_corpus(seed=0, size=120)
    b = default_corpus(seed=0, size=120)
    assert [(L.entries, k) for L, k in a] == [(L.entries, k) for L, k in b]
    residues = {equivalence_ratio(L, k)[1] % 8 for L, k in a[:40]}
    table = build_phase_table(a)
    assert set(table.mapping) == set(range(8))
    assert table.skipped == 0  # corpus pre-filters vanishing sums


def test_fixture_reproduced_by_rebuild():
    fixture = load_fixture_table()
    rebuilt = build_phase_table(default_corpus(seed=0, size=fixture.corpus_size))
    assert rebuilt.same_phases(fixture)
    assert rebuilt.corpus_size == fixture.corpus_size
    assert rebuilt.max_deviation <= 1e-7


# ---------------------------------------------------------------------------
# Reciprocity, nondegenerate

def test_reciprocity_unit_framings():
    chk = verify_reciprocity_dt(sym([[1]]), 2)
    assert abs(chk.lhs - (1 + 1j)) < 1e-12
    assert abs(chk.rhs - math.sqrt(2) * complex(math.sqrt(0.5), math.sqrt(0.5))) < 1e-12
    assert chk.ok
    chk = verify_reciprocity_dt(sym([[-1]]), 2)
    assert abs(chk.lhs - (1 - 1j)) < 1e-12
    assert chk.ok


def test_reciprocity_vanishing_both_sides():
    chk = verify_reciprocity_dt(sym([[2]]), 2)
    assert abs(chk.lhs) < 1e-12 and abs(chk.rhs) < 1e-12 and chk.ok


def test_reciprocity_rejects_degenerate_and_odd():
    with pytest.raises(DegenerateMatrix):
        verify_reciprocity_dt(sym([[0]]), 2)
    with pytest.raises(ValueError):
        verify_reciprocity_dt(sym([[1]]), 3)


def test_reciprocity_random_corpus():
    rng = random.Random(71)
    for _ in range(200):
        L = random_nondegenerate(rng, 3, 4)
        r = rng.choice((2, 4, 6))
        chk = verify_reciprocity_dt(L, r)
        assert chk.ok, (L.entries, r, chk.lhs, chk.rhs)


# ---------------------------------------------------------------------------
# Reciprocity, degenerate

def test_degenerate_zero_matrix_modes():
    full = verify_reciprocity_degenerate(sym([[0]]), 2, "full_nullity")
    assert abs(full.lhs - 2) < 1e-12 and abs(full.rhs - 2) < 1e-12 and full.ok
    half = verify_reciprocity_degenerate(sym([[0]]), 2, "paper_half")
    assert abs(half.rhs - math.sqrt(2)) < 1e-12
    assert not half.ok


def test_degenerate_block_example():
    chk = verify_reciprocity_degenerate(sym([[1, 0], [0, 0]]), 2, "full_nullity")
    assert abs(chk.lhs - 2 * (1 + 1j)) < 1e-12
    assert chk.ok


def test_degenerate_random_constructed_corpus():
    rng = random.Random(73)
    for _ in range(100):
        L = random_degenerate(rng)
        r = rng.choice((2, 4))
        chk = verify_reciprocity_degenerate(L, r, "full_nullity")
        assert chk.ok, (L.entries, r)


def test_degenerate_mode_validation():
    with pytest.raises(ValueError):
        verify_reciprocity_degenerate(sym([[0]]), 2, "thirds")


def test_random_degenerate_really_degenerate():
    rng = random.Random(79)
    for _ in range(20):
        L = random_degenerate(rng)
        assert regular_decomposition(L).nullity >= 1
