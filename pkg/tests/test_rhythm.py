import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from tresillo import errors
from tresillo.rhythm import (centroid, clave_template, corpus_mean, dumps_vector, load_vector,
                             loads_vector, normalize, reggaeton_template, save_vector,
                             tresillo_template)
from tresillo.similarity import cosine

counts = arrays(np.float64, 16, elements=st.floats(0, 100)).filter(lambda v: np.linalg.norm(v) > 1e-3)


def e(i):
    v = np.zeros(16)
    v[i] = 1.0
    return v


def test_normalize_examples():
    assert normalize(e(0)).tolist() == e(0).tolist()
    v = np.zeros(16)
    v[0], v[3] = 3, 4
    out = normalize(v)
    assert out[0] == pytest.approx(0.6, abs=1e-15) and out[3] == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(errors.EmptyRhythm):
        normalize(np.zeros(16))


def test_normalize_validates():
    with pytest.raises(ValueError):
        normalize(np.ones(15))
    with pytest.raises(ValueError):
        normalize(-e(0))


def test_tresillo_template():
    t = tresillo_template()
    assert set(np.flatnonzero(t)) == {0, 3, 6, 8, 11, 14}
    np.testing.assert_allclose(t[t > 0], 1 / math.sqrt(6), atol=1e-12)
    assert t[0] == pytest.approx(0.40825, abs=1e-5)


def test_clave_template():
    c = clave_template()
    assert set(np.flatnonzero(c)) == {0, 3, 6, 10, 12}
    assert cosine(c, tresillo_template()) == pytest.approx(3 / math.sqrt(30), abs=1e-12)
    assert cosine(c, c) == pytest.approx(1.0, abs=1e-12)


def test_reggaeton_template():
    r = reggaeton_template()
    pattern = r / r[3]
    np.testing.assert_allclose(pattern, [2, 0, 0, 1, 1, 0, 1, 0, 2, 0, 0, 1, 1, 0, 1, 0], atol=1e-12)
    assert cosine(r, tresillo_template()) == pytest.approx(8 / math.sqrt(84), abs=1e-12)


@pytest.mark.parametrize("template", [tresillo_template, clave_template, reggaeton_template])
def test_templates_are_fixed_points(template):
    v = template()
    np.testing.assert_allclose(normalize(v), v, atol=1e-15)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_centroid_examples():
    v = tresillo_template()
    assert centroid([v, v, v]).tolist() == v.tolist()
    out = centroid([e(0), e(3)])
    expected = np.zeros(16)
    expected[[0, 3]] = 1 / math.sqrt(2)
    np.testing.assert_allclose(out, expected, atol=1e-15)
    with pytest.raises(errors.EmptyInput):
        centroid([])


def test_corpus_mean_examples():
    v = clave_template()
    np.testing.assert_allclose(corpus_mean([v]), v, atol=1e-15)
    manual = np.zeros(16)
    manual[0], manual[4] = 2 / 3, 1 / 3
    np.testing.assert_allclose(corpus_mean([e(0), e(0), e(4)]), manual / np.linalg.norm(manual), atol=1e-15)
    with pytest.raises(errors.EmptyInput):
        corpus_mean([])


def test_centroid_weights_songs_equally():
    long_song = e(0) * 1000
    assert centroid([long_song, e(3)])[0] == pytest.approx(centroid([e(0), e(3)])[0])


@given(counts)
def test_normalize_unit_and_nonnegative(v):
    out = normalize(v)
    assert abs(np.linalg.norm(out) - 1.0) <= 1e-12
    assert (out >= 0).all()


@given(counts, st.floats(1e-3, 1e3))
def test_normalize_idempotent(v, c):
    np.testing.assert_allclose(normalize(normalize(v) * c), normalize(v), atol=1e-12)


@given(counts, st.integers(1, 5))
def test_centroid_of_copies(v, k):
    u = normalize(v)
    np.testing.assert_allclose(centroid([u] * k), u, atol=1e-15)


def test_vector_json(tmp_path):
    v = tresillo_template()
    assert loads_vector(dumps_vector(v)).tolist() == v.tolist()
    p = tmp_path / "ref.json"
    save_vector(p, v)
    assert load_vector(p).tolist() == v.tolist()
    with pytest.raises(ValueError):
        loads_vector("[1, 2]")
