from salientcodec.core.parameters import ParameterStore, PARAMETER_MAGIC
from salientcodec.core.tensor import Tensor
from salientcodec.utils.errors import CorruptionError, FormatError, ModelError

import pytest
import numpy as np


@pytest.fixture
def store(rng):
    s = ParameterStore()
    s.add('enc.0.weight', Tensor(rng.standard_normal((4, 3, 5, 5))))
    s.add('enc.0.bias', Tensor(np.zeros(4)))
    s.add('prior3.matrix0', Tensor(rng.standard_normal((2, 3, 1)), dtype=np.float32))
    return s


def test_bytes_round_trip_is_bit_exact(store):
    data = store.to_bytes()
    assert data[:4] == PARAMETER_MAGIC
    back = ParameterStore.from_bytes(data)
    assert back.names() == store.names()
    for name, t in store.items():
        assert back[name].dtype == t.dtype
        assert back[name].data.tobytes() == t.data.tobytes()
    assert back.to_bytes() == data


def test_file_round_trip(store, tmp_path):
    path = tmp_path / 'model.sdhc'
    store.save(path)
    assert ParameterStore.load(path).digest() == store.digest()
    assert len(store.digest()) == 8
    assert store.hexdigest() == store.digest().hex()


def test_names_are_unique(store):
    with pytest.raises(ValueError):
        store.add('enc.0.bias', Tensor(np.zeros(4)))


def test_bad_magic_and_truncation(store):
    data = store.to_bytes()
    with pytest.raises(FormatError):
        ParameterStore.from_bytes(b'XXXX' + data[4:])
    with pytest.raises(CorruptionError) as info:
        ParameterStore.from_bytes(data[:-3])
    assert info.value.offset is not None
    with pytest.raises(CorruptionError):
        ParameterStore.from_bytes(data + b'\x00')


def test_missing_parameter_is_a_model_error(store):
    with pytest.raises(ModelError):
        store['nope']


def test_copy_is_independent(store):
    clone = store.copy()
    clone['enc.0.bias'].data[:] = 1.0
    assert np.all(store['enc.0.bias'].data == 0.0)
    assert clone.digest() != store.digest()


def test_assign_keeps_identity(store):
    target = store['enc.0.weight']
    clone = store.copy()
    clone['enc.0.weight'].data[:] = 0.5
    store.assign(clone)
    assert store['enc.0.weight'] is target
    assert np.all(target.data == 0.5)


def test_assign_rejects_other_layouts(store):
    other = ParameterStore()
    other.add('x', Tensor(np.zeros(1)))
    with pytest.raises(ModelError):
        store.assign(other)


def test_freeze_by_prefix(store):
    store.freeze('enc.')
    assert not store['enc.0.weight'].requires_grad
    assert store['prior3.matrix0'].requires_grad
    store.unfreeze()
    assert all(t.requires_grad for _, t in store.items())


def test_digest_changes_with_values(store):
    before = store.digest()
    store['enc.0.bias'].data[0] = 1e-12
    assert store.digest() != before


def test_all_finite(store):
    assert store.all_finite()
    store['enc.0.bias'].data[0] = np.nan
    assert not store.all_finite()
