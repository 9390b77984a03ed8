import pytest

from app.domain.exceptions import DecompositionError, FockSpaceError
from app.domain.services.fockspace import enumerate_basis
from app.domain.services.idealops import (
    build_dictionary,
    decompose_projection,
    default_max_ideal_grade,
    relation_tables,
)
from app.domain.value_objects import DetectorModel, ModeSet, Outcome, Scheme, SchemeConfig


@pytest.fixture
def active_dictionary(active_scheme, active_model, one_mode_space):
    return build_dictionary(active_scheme, active_model, one_mode_space)


def test_single_mode_active_size(active_dictionary):
    """Test identity, six POVM elements and eleven ideal operators."""
    assert active_dictionary.n_bob == 18
    assert active_dictionary.bob_ops[0].name == "I"
    assert [op.name for op in active_dictionary.bob_ops[1:7]] == [
        "M_H", "M_V", "M_HV", "M_D", "M_A", "M_DA",
    ]


def test_two_mode_active_size(two_mode_space):
    """Test the two-spatial-mode dictionary with the default pair set."""
    scheme = SchemeConfig(Scheme.ACTIVE, spatial_mode_count=2)
    model = DetectorModel.symmetric(scheme, 0.5)

    dictionary = build_dictionary(scheme, model, two_mode_space)

    assert dictionary.n_bob == 35
    assert dictionary.max_ideal_grade == 2


def test_four_mode_passive_size():
    """Test four spatial modes stop at one photon by default."""
    scheme = SchemeConfig(Scheme.PASSIVE, spatial_mode_count=4)
    model = DetectorModel.symmetric(scheme, 0.5)
    space = enumerate_basis(ModeSet(4), 1)

    dictionary = build_dictionary(scheme, model, space)

    assert default_max_ideal_grade(scheme) == 1
    assert dictionary.n_bob == 25


def test_measurement_only_dictionary(active_scheme, active_model, one_mode_space):
    """Test grade -1 keeps the measurement operators only."""
    dictionary = build_dictionary(
        active_scheme, active_model, one_mode_space, max_ideal_grade=-1
    )

    assert dictionary.n_bob == 7
    assert dictionary.ideal_indices == ()


def test_grade_above_two_rejected(active_scheme, active_model):
    """Test ideal operators stop at two photons."""
    space = enumerate_basis(ModeSet(1), 3)

    with pytest.raises(DecompositionError):
        build_dictionary(active_scheme, active_model, space, max_ideal_grade=3)


def test_grade_above_cutoff_rejected(active_scheme, active_model):
    """Test the cutoff must reach the ideal grade."""
    space = enumerate_basis(ModeSet(1), 1)

    with pytest.raises(FockSpaceError):
        build_dictionary(active_scheme, active_model, space, max_ideal_grade=2)


def test_one_photon_projections(active_dictionary):
    """Test M_V and M_D on one photon expand over the qubit operators."""
    povm = active_dictionary.povm

    m_v = decompose_projection(povm, Outcome.V, 1, active_dictionary)
    m_d = decompose_projection(povm, Outcome.D, 1, active_dictionary)

    assert m_v.coefficients == pytest.approx({"I2@1": 0.5, "~MH1@1": -0.5})
    assert m_d.coefficients == pytest.approx({"~MD1@1": 1.0})
    assert m_v.undecomposable == ()


def test_two_photon_double_click(active_dictionary):
    """Test the two-photon double click is half the |1,1> projector."""
    found = decompose_projection(active_dictionary.povm, Outcome.HV, 2, active_dictionary)

    assert found.coefficients == pytest.approx(
        {"I3@1": 0.5, "~MH2@1": -0.5, "~MV2@1": -0.5}
    )


def test_projection_above_ideal_grade_rejected(active_dictionary):
    """Test there is nothing to expand over above the ideal grade."""
    with pytest.raises(DecompositionError):
        decompose_projection(active_dictionary.povm, Outcome.H, 3, active_dictionary)


def test_block_identity(active_dictionary):
    """Test each block starts with its identity."""
    assert active_dictionary.block_identity((1,)) == active_dictionary.index("I2@1")
    assert active_dictionary.block_identity((2,)) == active_dictionary.index("I3@1")


def test_relation_tables(active_dictionary):
    """Test commuting pairs, orthogonal pairs and the sy^2 = I identity."""
    d = active_dictionary
    tables = relation_tables(d)
    vac, qubit_id, sy = d.index("Vac"), d.index("I2@1"), d.index("sy@1")

    assert all((0, l) in tables.commuting for l in range(1, d.n_bob))
    assert (d.index("M_H"), d.index("M_HV")) in tables.commuting
    assert (d.index("M_H"), d.index("M_D")) not in tables.commuting
    assert tables.is_orthogonal(vac, qubit_id)
    assert tables.is_orthogonal(d.index("M_H"), vac)
    assert tables.is_orthogonal(d.index("M_HV"), qubit_id)
    assert tables.imaginary[sy]
    assert any(
        dict(identity.products) == {(sy, sy): 1.0}
        and identity.span == pytest.approx({qubit_id: 1.0})
        for identity in tables.product_identities
    )


def _pair(d, a, b):
    j, l = d.index(a), d.index(b)
    return min(j, l), max(j, l)


def test_relation_tables_split_by_product(active_dictionary):
    """Test block-level commuting and vanishing products between POVM elements and ideals."""
    d = active_dictionary
    tables = relation_tables(d)

    assert not tables.commuting & tables.orthogonal
    assert len(tables.commuting) == 47
    assert len(tables.orthogonal) == 60
    assert _pair(d, "M_H", "~MH2@1") in tables.commuting
    assert _pair(d, "M_D", "~MD1@1") in tables.commuting
    assert _pair(d, "M_HV", "I3@1") in tables.commuting
    assert _pair(d, "I2@1", "sy@1") in tables.commuting
    assert _pair(d, "M_V", "~MH1@1") in tables.orthogonal
    assert _pair(d, "M_DA", "~MA2@1") in tables.orthogonal
    assert _pair(d, "~MH2@1", "~MV2@1") in tables.orthogonal
    assert _pair(d, "M_D", "~MH1@1") not in tables.commuting | tables.orthogonal
    assert _pair(d, "M_HV", "M_DA") not in tables.commuting | tables.orthogonal


def test_product_identities_stay_in_block_span(active_dictionary):
    """Test the nine qubit products and the nine closed two-photon products."""
    d = active_dictionary
    identities = relation_tables(d).product_identities
    by_pattern = {p: [i for i in identities if i.pattern == p] for p in d.blocks}
    sy, qubit_id = d.index("sy@1"), d.index("I2@1")
    mh2, mv2 = d.index("~MH2@1"), d.index("~MV2@1")
    identity_members = {d.block_identity(p) for p in d.blocks}

    assert len(identities) == 18
    assert by_pattern[(0,)] == []
    assert len(by_pattern[(1,)]) == 9
    assert len(by_pattern[(2,)]) == 9
    assert all(not identity_members & set(pair) for i in identities for pair in i.products)
    ids = {next(iter(i.products)): i.span for i in identities}
    assert ids[(sy, sy)] == pytest.approx({qubit_id: 1.0})
    assert ids[(mh2, mv2)] == {}
    assert (mh2, d.index("~MD2@1")) not in ids
