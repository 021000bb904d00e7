"""
File: config.py
Description: architecture hyper-parameters of the hierarchical codec
"""

from __future__ import absolute_import

from collections import OrderedDict

from salientcodec.entropy.gaussian_conditional import SCALE_BOUND

ACTIVATIONS = ('leaky_relu',)


class ModelConfig():
    """
        latent_channels is C of every y_n, hyper_channels the width of z_n and
        feature_channels the width of the encoder / decoder features u_n, v_n.
        The encoder downsamples by 2**encoder_depth before the first latent,
        three stride-2 convs in f_enc plus the downscaling conv of LSU 1.
    """

    def __init__(self, latent_channels: int = 128, hyper_channels: int = 96,
                 feature_channels: int = 128, encoder_depth: int = 4, lsu_count: int = 3,
                 activation: str = 'leaky_relu', pad_multiple: int = 64,
                 scale_bound: float = SCALE_BOUND):
        for name, value in (('latent_channels', latent_channels),
                            ('hyper_channels', hyper_channels),
                            ('feature_channels', feature_channels)):
            if not isinstance(value, int) or value < 1:
                raise ValueError(f'{name} must be a positive integer, got {value!r}')
        if lsu_count != 3:
            raise ValueError(f'the codec has exactly 3 latent space units, got {lsu_count}')
        if encoder_depth != 4:
            raise ValueError(f'encoder_depth is fixed at 4 stride-2 convs, got {encoder_depth}')
        if activation not in ACTIVATIONS:
            raise ValueError(f'activation must be one of {ACTIVATIONS}, got {activation!r}')
        if pad_multiple != 2 ** (encoder_depth + lsu_count - 1):
            raise ValueError(f'pad_multiple must be {2 ** (encoder_depth + lsu_count - 1)}, '
                             f'got {pad_multiple}')
        if scale_bound <= 0:
            raise ValueError(f'scale_bound must be positive, got {scale_bound}')
        self.latent_channels = latent_channels
        self.hyper_channels = hyper_channels
        self.feature_channels = feature_channels
        self.encoder_depth = encoder_depth
        self.lsu_count = lsu_count
        self.activation = activation
        self.pad_multiple = pad_multiple
        self.scale_bound = scale_bound

    @classmethod
    def small(cls) -> 'ModelConfig':
        """desk-scale widths used for synthetic experiments and tests"""
        return cls(latent_channels=8, hyper_channels=4, feature_channels=12)

    def level_factor(self, level: int) -> int:
        """input pixels per latent element side at a level"""
        return 2 ** (self.encoder_depth + level - 1)

    def to_dict(self) -> dict:
        return OrderedDict(vars(self))

    @classmethod
    def from_dict(cls, data: dict) -> 'ModelConfig':
        known = ('latent_channels', 'hyper_channels', 'feature_channels', 'encoder_depth',
                 'lsu_count', 'activation', 'pad_multiple', 'scale_bound')
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f'unknown model config keys {sorted(unknown)}')
        return cls(**data)

    def __eq__(self, other):
        return isinstance(other, ModelConfig) and vars(self) == vars(other)

    def __repr__(self):
        return (f'ModelConfig(C={self.latent_channels}, hyper={self.hyper_channels}, '
                f'features={self.feature_channels})')
