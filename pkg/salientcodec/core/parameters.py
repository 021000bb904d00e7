"""
File: parameters.py
Description: named parameter storage and its little-endian file container.

Container layout: magic b"SDHC", version u32, entry count u32, then per entry
name length u32, utf-8 name, dtype tag u8 (0 = float64, 1 = float32), rank u32,
extents u32 * rank, raw little-endian values.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Dict, Iterator, Tuple

from salientcodec.core.tensor import Tensor
from salientcodec.utils.errors import FormatError, CorruptionError, ModelError
from salientcodec.utils.fileio import write_bytes

import hashlib
import struct
import numpy as np

PARAMETER_MAGIC = b'SDHC'
PARAMETER_FORMAT_VERSION = 1

_DTYPE_TAGS = {np.dtype(np.float64): 0, np.dtype(np.float32): 1}
_TAG_DTYPES = {0: np.dtype('<f8'), 1: np.dtype('<f4')}


class ParameterStore():
    def __init__(self):
        self._params: Dict[str, Tensor] = OrderedDict()
        self.version = PARAMETER_FORMAT_VERSION

    def __len__(self):
        return len(self._params)

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __contains__(self, name):
        return name in self._params

    def __getitem__(self, name) -> Tensor:
        try:
            return self._params[name]
        except KeyError:
            raise ModelError(f'parameter {name!r} is not in the store')

    def __repr__(self):
        return f'ParameterStore({len(self)} tensors, {self.num_parameters()} values)'

    def add(self, name: str, tensor: Tensor) -> Tensor:
        if name in self._params:
            raise ValueError(f'parameter name {name!r} is already registered')
        if not isinstance(tensor, Tensor):
            raise TypeError(f'expected a Tensor for {name!r}, got {type(tensor).__name__}')
        tensor.name = name
        tensor.requires_grad = True
        self._params[name] = tensor
        return tensor

    def names(self):
        return list(self._params.keys())

    def items(self) -> Iterator[Tuple[str, Tensor]]:
        return iter(self._params.items())

    def subset(self, prefix: str):
        return [(name, t) for name, t in self._params.items() if name.startswith(prefix)]

    def num_parameters(self) -> int:
        return int(sum(t.size for t in self._params.values()))

    def zero_grad(self):
        for t in self._params.values():
            t.zero_grad()

    def freeze(self, prefix: str = ''):
        for name, t in self._params.items():
            if name.startswith(prefix):
                t.requires_grad = False

    def unfreeze(self, prefix: str = ''):
        for name, t in self._params.items():
            if name.startswith(prefix):
                t.requires_grad = True

    def copy(self) -> 'ParameterStore':
        clone = ParameterStore()
        for name, t in self._params.items():
            fresh = Tensor(t.data.copy(), dtype=t.data.dtype)
            clone._params[name] = fresh
            fresh.name = name
            fresh.requires_grad = t.requires_grad
        return clone

    def assign(self, other: 'ParameterStore'):
        """Overwrite values in place with other's, keeping tensor identities"""
        if self.names() != other.names():
            raise ModelError('parameter stores have different layouts')
        for name, t in self._params.items():
            src = other._params[name].data
            if src.shape != t.data.shape:
                raise ModelError(
                    f'shape of {name!r} differs: {t.data.shape} vs {src.shape}')
            t.data = src.astype(t.data.dtype, copy=True)
            t.grad = None

    def cast(self, dtype):
        for t in self._params.values():
            t.data = t.data.astype(dtype)
            t.grad = None

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(t.data)) for t in self._params.values())

    # ---------------------------------------------------------------- container

    def to_bytes(self) -> bytes:
        chunks = [PARAMETER_MAGIC, struct.pack('<II', self.version, len(self._params))]
        for name, t in self._params.items():
            dtype = np.dtype(t.data.dtype)
            if dtype not in _DTYPE_TAGS:
                raise ValueError(f'unsupported dtype {dtype} for {name!r}')
            encoded = name.encode('utf-8')
            chunks.append(struct.pack('<I', len(encoded)))
            chunks.append(encoded)
            chunks.append(struct.pack('<BI', _DTYPE_TAGS[dtype], t.data.ndim))
            chunks.append(struct.pack(f'<{t.data.ndim}I', *t.data.shape))
            chunks.append(t.data.astype(dtype.newbyteorder('<')).tobytes())
        return b''.join(chunks)

    @classmethod
    def from_bytes(cls, data: bytes) -> 'ParameterStore':
        if data[:4] != PARAMETER_MAGIC:
            raise FormatError('not a parameter file (magic mismatch)')
        reader = _Reader(data, 4)
        version, count = reader.unpack('<II')
        if version != PARAMETER_FORMAT_VERSION:
            raise FormatError(f'unsupported parameter file version {version}')
        store = cls()
        for _ in range(count):
            (name_len,) = reader.unpack('<I')
            name = reader.read(name_len).decode('utf-8')
            tag, rank = reader.unpack('<BI')
            if tag not in _TAG_DTYPES:
                raise FormatError(f'unknown dtype tag {tag} for {name!r}')
            shape = reader.unpack(f'<{rank}I')
            dtype = _TAG_DTYPES[tag]
            count_values = int(np.prod(shape))
            raw = reader.read(count_values * dtype.itemsize)
            values = np.frombuffer(raw, dtype=dtype).reshape(shape)
            native = dtype.newbyteorder('=')
            store.add(name, Tensor(values.astype(native), dtype=native))
        if reader.offset != len(data):
            raise CorruptionError('trailing bytes after the last parameter', reader.offset)
        return store

    def save(self, path):
        write_bytes(path, self.to_bytes())

    @classmethod
    def load(cls, path) -> 'ParameterStore':
        with open(path, 'rb') as f:
            return cls.from_bytes(f.read())

    def digest(self) -> bytes:
        """8-byte model hash carried in every bitstream header"""
        return hashlib.sha256(self.to_bytes()).digest()[:8]

    def hexdigest(self) -> str:
        return self.digest().hex()


class _Reader():
    def __init__(self, data: bytes, offset: int = 0):
        self.data = data
        self.offset = offset

    def read(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise CorruptionError('parameter file is truncated', self.offset)
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.read(struct.calcsize(fmt)))
