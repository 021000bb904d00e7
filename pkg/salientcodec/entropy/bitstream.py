"""
File: bitstream.py
Description: the .sdvc container and the latent <-> bytes transport.

Layout, little endian throughout:
    header   magic b"SDVC", version u16, flags u16, height u32, width u32
             (original image size), model hash 8 bytes, lambda id u8
    mask     u32 length + range coded mask signal
    payload  z3, y3, z2, y2, z1, y1, each u32 length + range coded bytes
    trailer  CRC-32 of everything before it, u32

Masked latent positions are skipped entirely: the decoder knows the mask
before it reads any latent segment.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Dict, Tuple

from salientcodec.runtime import is_reference_mode, reference_mode
from salientcodec.core.tensor import Tensor, no_grad
from salientcodec.entropy.mask_signal import read_mask_signal, signal_mask
from salientcodec.entropy.range_coder import RangeDecoder, RangeEncoder
from salientcodec.masks.saliency_mask import CELL_SIZE, project_mask_to_level
from salientcodec.models.latents import LatentSet, LevelLatents
from salientcodec.utils.errors import CorruptionError, FormatError, WrongModelError
from salientcodec.utils.typing import SegmentKey

import math
import struct
import zlib
import numpy as np

BITSTREAM_MAGIC = b'SDVC'
BITSTREAM_VERSION = 1
FLAG_REFERENCE_MODE = 0x0001
SEGMENT_ORDER = (('z', 3), ('y', 3), ('z', 2), ('y', 2), ('z', 1), ('y', 1))

_HEADER = struct.Struct('<4sHHII8sB')
_LENGTH = struct.Struct('<I')


def padded_size(height: int, width: int, multiple: int = CELL_SIZE) -> Tuple[int, int]:
    return (math.ceil(height / multiple) * multiple, math.ceil(width / multiple) * multiple)


class Bitstream():
    def __init__(self, height: int, width: int, model_hash: bytes, lambda_id: int = 0,
                 reference_mode: bool = True, mask_segment: bytes = b'',
                 segments: Dict[SegmentKey, bytes] = None, version: int = BITSTREAM_VERSION):
        if len(model_hash) != 8:
            raise ValueError(f'model hash has to be 8 bytes, got {len(model_hash)}')
        if not 0 <= lambda_id <= 255:
            raise ValueError(f'lambda id must fit in a byte, got {lambda_id}')
        self.height = height
        self.width = width
        self.model_hash = bytes(model_hash)
        self.lambda_id = lambda_id
        self.reference_mode = reference_mode
        self.version = version
        self.mask_segment = bytes(mask_segment)
        segments = segments or {}
        self.segments = OrderedDict((key, bytes(segments.get(key, b''))) for key in SEGMENT_ORDER)
        self.offsets = {}

    @property
    def padded_size(self) -> Tuple[int, int]:
        return padded_size(self.height, self.width)

    def serialize(self) -> bytes:
        flags = FLAG_REFERENCE_MODE if self.reference_mode else 0
        chunks = [_HEADER.pack(BITSTREAM_MAGIC, self.version, flags, self.height, self.width,
                               self.model_hash, self.lambda_id),
                  _LENGTH.pack(len(self.mask_segment)), self.mask_segment]
        for key in SEGMENT_ORDER:
            chunks.append(_LENGTH.pack(len(self.segments[key])))
            chunks.append(self.segments[key])
        body = b''.join(chunks)
        return body + _LENGTH.pack(zlib.crc32(body) & 0xFFFFFFFF)

    @classmethod
    def parse(cls, data: bytes) -> 'Bitstream':
        data = bytes(data)
        if data[:4] != BITSTREAM_MAGIC:
            raise FormatError('not an .sdvc bitstream (magic mismatch)')
        if len(data) < _HEADER.size:
            raise CorruptionError('bitstream header is truncated', len(data))
        _, version, flags, height, width, model_hash, lambda_id = _HEADER.unpack_from(data)
        if version != BITSTREAM_VERSION:
            raise FormatError(f'unsupported bitstream version {version}')
        pos = _HEADER.size
        offsets = {}

        def take():
            nonlocal pos
            if pos + _LENGTH.size > len(data):
                raise CorruptionError('bitstream ends inside a length prefix', pos)
            (size,) = _LENGTH.unpack_from(data, pos)
            start = pos + _LENGTH.size
            if start + size > len(data):
                raise CorruptionError('bitstream segment is truncated', start)
            pos = start + size
            return start, data[start:pos]

        offsets['mask'], mask_segment = take()
        segments = OrderedDict()
        for key in SEGMENT_ORDER:
            offsets[key], segments[key] = take()
        if pos + _LENGTH.size > len(data):
            raise CorruptionError('bitstream checksum is missing', pos)
        (stored,) = _LENGTH.unpack_from(data, pos)
        if pos + _LENGTH.size != len(data):
            raise CorruptionError('trailing bytes after the checksum', pos + _LENGTH.size)
        if zlib.crc32(data[:pos]) & 0xFFFFFFFF != stored:
            raise CorruptionError('bitstream checksum mismatch', pos)

        stream = cls(height, width, model_hash, lambda_id,
                     bool(flags & FLAG_REFERENCE_MODE), mask_segment, segments, version)
        stream.offsets = offsets
        return stream

    def segment_sizes(self) -> Dict:
        """bytes per container part, length prefixes included; sums to len(self)"""
        sizes = OrderedDict([('header', _HEADER.size),
                             ('mask', _LENGTH.size + len(self.mask_segment))])
        for key in SEGMENT_ORDER:
            sizes[key] = _LENGTH.size + len(self.segments[key])
        sizes['checksum'] = _LENGTH.size
        return sizes

    def __len__(self):
        return int(sum(self.segment_sizes().values()))

    @property
    def total_bits(self) -> int:
        return 8 * len(self)

    def __eq__(self, other):
        return isinstance(other, Bitstream) and self.serialize() == other.serialize()

    def __repr__(self):
        return (f'Bitstream({self.height}x{self.width}, {len(self)} bytes, '
                f'lambda_id={self.lambda_id})')


def _level_positions(mask2d: np.ndarray, channels: int):
    """(channel, row, col) index arrays of coded positions, channel-major raster order"""
    return np.nonzero(np.broadcast_to(mask2d.astype(bool), (channels,) + mask2d.shape))


def encode_bitstream(latents: LatentSet, m, codec, lambda_id: int = 0) -> Bitstream:
    """encode_bitstream.
        Range code z under the factorized priors and the unmasked part of y
        under the Gaussian conditional, deepest level first.

    Args:
        latents: inference-mode LatentSet of a single image
        m: SaliencyMask shared with the decoder
        codec: HierarchicalCodec whose parameters produced latents
        lambda_id: rate point index recorded in the header
    """
    latents.check_complete()
    if latents.mode != 'infer':
        raise ValueError('only inference-mode latents can be entropy coded')
    priors = codec.entropy
    segments = OrderedDict()
    for n in (3, 2, 1):
        level = latents[n]
        if level.y_hat.shape[0] != 1:
            raise ValueError('a bitstream carries exactly one image')
        y_symbols, z_symbols = latents.symbols(n)

        encoder = RangeEncoder()
        priors.factorized[n].encode(encoder, z_symbols[0])
        segments[('z', n)] = encoder.finish()

        positions = _level_positions(level.mask, y_symbols.shape[1])
        encoder = RangeEncoder()
        priors.gaussian.encode(encoder, y_symbols[0][positions],
                               level.mu.data[0][positions], level.sigma.data[0][positions])
        segments[('y', n)] = encoder.finish()

    height, width = latents.original_size
    return Bitstream(height, width, codec.digest(), lambda_id, is_reference_mode(),
                     signal_mask(m), segments)


def decode_bitstream(b, codec) -> LatentSet:
    """decode_bitstream.
        Inverse of encode_bitstream. The mask is read first, then every level
        is decoded after the deeper one, whose features condition its
        entropy parameters.

    Args:
        b: Bitstream or its serialized bytes
        codec: HierarchicalCodec holding the parameters the stream was made with
    """
    stream = b if isinstance(b, Bitstream) else Bitstream.parse(b)
    if stream.model_hash != codec.digest():
        raise WrongModelError(
            f'bitstream was made by model {stream.model_hash.hex()}, '
            f'loaded model is {codec.digest().hex()}')
    image_size = stream.padded_size
    m = read_mask_signal(stream.mask_segment, image_size, stream.offsets.get('mask', 0))
    priors = codec.entropy
    levels = OrderedDict()
    with reference_mode(stream.reference_mode), no_grad():
        v_next = codec.zero_context(*image_size)
        for n in (3, 2, 1):
            y_grid = codec.latent_grid_dims(*image_size, n)
            z_grid = codec.hyper_grid_dims(*image_size, n)
            decoder = RangeDecoder(stream.segments[('z', n)], stream.offsets.get(('z', n), 0))
            z_symbols = priors.factorized[n].decode(
                decoder, (codec.config.hyper_channels,) + z_grid)
            z_hat = Tensor(z_symbols[None].astype(np.float64))
            mu, sigma = codec.hyper_parameters(n, z_hat, v_next)

            level_mask = project_mask_to_level(m, n)
            channels = codec.config.latent_channels
            positions = _level_positions(level_mask, channels)
            decoder = RangeDecoder(stream.segments[('y', n)], stream.offsets.get(('y', n), 0))
            values = priors.gaussian.decode(decoder, mu.data[0][positions], sigma.data[0][positions])
            y_symbols = np.zeros((channels,) + y_grid, dtype=np.float64)
            y_symbols[positions] = values
            y_hat = Tensor(y_symbols[None])

            levels[n] = LevelLatents(n, y_hat, z_hat, mu, sigma, level_mask)
            v_next = codec.upsample_level(n, y_hat, v_next)
    return LatentSet(levels, m, 'infer', image_size,
                     original_size=(stream.height, stream.width), lambda_id=stream.lambda_id)
