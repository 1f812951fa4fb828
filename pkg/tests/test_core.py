import pytest
from hypothesis import given
from hypothesis import strategies as st

from driftlab.core import (
    MISSING,
    NOMINAL,
    NUMERIC,
    Attribute,
    ClassPosterior,
    Instance,
    LoadedStream,
    SchemaMismatch,
    StreamSchema,
    UnknownClass,
)


def two_class_schema():
    return StreamSchema(
        (
            Attribute("x0", NUMERIC),
            Attribute("color", NOMINAL, ("red", "green", "blue")),
        ),
        ("no", "yes"),
    )


def test_attribute_kind_validation():
    with pytest.raises(ValueError):
        Attribute("x", "stringy")


def test_nominal_attribute_needs_values():
    with pytest.raises(ValueError):
        Attribute("color", NOMINAL)


def test_numeric_attribute_rejects_values():
    with pytest.raises(ValueError):
        Attribute("x", NUMERIC, ("a", "b"))


def test_attribute_cardinality():
    assert Attribute("c", NOMINAL, ("a", "b", "c")).cardinality == 3
    assert Attribute("x", NUMERIC).cardinality == 0


def test_schema_needs_two_classes():
    with pytest.raises(ValueError):
        StreamSchema((Attribute("x", NUMERIC),), ("only",))


def test_schema_rejects_duplicate_attribute_names():
    with pytest.raises(ValueError):
        StreamSchema((Attribute("x", NUMERIC), Attribute("x", NUMERIC)), ("a", "b"))


def test_class_index_lookup():
    schema = two_class_schema()
    assert schema.class_index("no") == 0
    assert schema.class_index("yes") == 1
    with pytest.raises(UnknownClass):
        schema.class_index("maybe")


def test_schema_counts():
    schema = two_class_schema()
    assert schema.class_count == 2
    assert schema.n_attributes == 2


def test_validate_instance_accepts_good_rows():
    schema = two_class_schema()
    schema.validate_instance(Instance((1.5, 2), label=1))
    schema.validate_instance(Instance((MISSING, MISSING), label=0))
    schema.validate_instance(Instance((0.0, 0)))  # unlabeled is fine


def test_validate_instance_arity():
    schema = two_class_schema()
    with pytest.raises(SchemaMismatch):
        schema.validate_instance(Instance((1.0,), label=0))


def test_validate_instance_value_kinds():
    schema = two_class_schema()
    with pytest.raises(SchemaMismatch):
        schema.validate_instance(Instance(("oops", 0), label=0))
    with pytest.raises(SchemaMismatch):
        schema.validate_instance(Instance((1.0, 7), label=0))  # index past cardinality
    with pytest.raises(SchemaMismatch):
        schema.validate_instance(Instance((1.0, -1), label=0))


def test_validate_instance_label_range():
    schema = two_class_schema()
    with pytest.raises(UnknownClass):
        schema.validate_instance(Instance((1.0, 0), label=2))


def test_instance_equality_and_hash():
    a = Instance((1.0, 2), label=1)
    b = Instance((1.0, 2), label=1)
    c = Instance((1.0, 2), label=0)
    assert a == b
    assert hash(a) == hash(b)
    assert a != c
    assert a != "not an instance"


def test_loaded_stream_iterates_in_order():
    schema = two_class_schema()
    rows = [Instance((float(i), 0), label=i % 2) for i in range(5)]
    stream = LoadedStream("s", schema, rows, {})
    assert len(stream) == 5
    assert list(stream) == rows


class TestClassPosterior:
    def test_normalizes(self):
        post = ClassPosterior([2.0, 1.0, 1.0])
        assert post.probs == pytest.approx([0.5, 0.25, 0.25])
        assert post.top_index == 0
        assert post.top_prob == pytest.approx(0.5)
        assert post.second_prob == pytest.approx(0.25)

    def test_margin(self):
        post = ClassPosterior([0.7, 0.3])
        assert post.margin == pytest.approx(0.4)

    def test_tie_breaks_to_lowest_index(self):
        post = ClassPosterior([0.25, 0.25, 0.25, 0.25])
        assert post.top_index == 0
        assert post.margin == pytest.approx(0.0)

    def test_uniform(self):
        post = ClassPosterior.uniform(4)
        assert post.probs == [0.25] * 4
        assert post.top_index == 0
        assert post.margin == 0.0

    def test_uniform_needs_two_classes(self):
        with pytest.raises(ValueError):
            ClassPosterior.uniform(1)

    def test_sequence_protocol(self):
        post = ClassPosterior([1.0, 3.0])
        assert len(post) == 2
        assert post[1] == pytest.approx(0.75)

    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            ClassPosterior([0.5, -0.1])

    def test_rejects_zero_sum(self):
        with pytest.raises(ValueError):
            ClassPosterior([0.0, 0.0])

    def test_rejects_single_class(self):
        with pytest.raises(ValueError):
            ClassPosterior([1.0])


@given(
    st.lists(
        st.floats(min_value=1e-6, max_value=1e6, allow_nan=False),
        min_size=2,
        max_size=8,
    )
)
def test_posterior_invariants(raw):
    post = ClassPosterior(raw)
    assert sum(post.probs) == pytest.approx(1.0, abs=1e-9)
    assert post.top_prob == max(post.probs)
    assert post.top_index == post.probs.index(max(post.probs))
    assert 0.0 <= post.margin <= 1.0
    assert post.second_prob <= post.top_prob
