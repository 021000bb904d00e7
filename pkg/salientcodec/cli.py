"""
File: cli.py
Description: command-line surface. Subcommands mask, encode, decode, train
and eval. Exit codes: 0 ok, 2 input, 3 model, 4 corrupt stream, 5 divergence.
"""

from __future__ import absolute_import

from collections import OrderedDict
from multiprocessing import Pool
from typing import List, Optional

from salientcodec.runtime import max_threads, reference_mode, set_reference_mode
from salientcodec.datasets.synthetic import make_synthetic_dataset
from salientcodec.engines.schedule import TrainingConfig, read_config_file, train_schedule
from salientcodec.entropy.bitstream import Bitstream, decode_bitstream, encode_bitstream
from salientcodec.entropy.mask_signal import signal_mask
from salientcodec.masks.criteria import detection_mask, gt_mask, variance_mask
from salientcodec.masks.io import load_annotations, load_detections, read_mask_ascii, write_mask_ascii
from salientcodec.models.checkpoint import load_checkpoint, save_checkpoint
from salientcodec.models.config import ModelConfig
from salientcodec.tools.rate_accuracy import (ClassAPTable, RateAccuracyCurve, bits_per_pixel,
                                              weighted_ap)
from salientcodec.tools.report import format_bd_table
from salientcodec.tools.visualization import emit_curves, read_curves_csv
from salientcodec.utils.errors import CodecError, InputError
from salientcodec.utils.fileio import write_bytes, write_text
from salientcodec.utils.imageio import read_image, write_image
from salientcodec.utils.noindent_encoder import dumps_snapshot

import os
import sys
import argparse
import configparser
import numpy as np

MASK_SOURCES = ('variance', 'detections', 'gt', 'file')
EXIT_OK = 0
EXIT_INPUT = 2


class RunConfig():
    """validated arguments of one CLI invocation"""

    def __init__(self, subcommand: str, inputs: List[str] = None, output: str = None,
                 checkpoint: str = None, mask_source: str = 'variance', detections: str = None,
                 annotations: str = None, mask_file: str = None, image_id: str = None,
                 lambda_id: int = 0, reference_mode: bool = True, per_cell_bits: bool = False):
        self.subcommand = subcommand
        self.inputs = list(inputs or [])
        self.output = output
        self.checkpoint = checkpoint
        self.mask_source = mask_source
        self.detections = detections
        self.annotations = annotations
        self.mask_file = mask_file
        self.image_id = image_id
        self.lambda_id = lambda_id
        self.reference_mode = reference_mode
        self.per_cell_bits = per_cell_bits
        self.validate()

    def validate(self):
        if self.mask_source not in MASK_SOURCES:
            raise InputError(f'--mask must be one of {MASK_SOURCES}, got {self.mask_source!r}')
        needs = {'detections': ('detections', self.detections),
                 'gt': ('annotations', self.annotations),
                 'file': ('mask-file', self.mask_file)}
        if self.subcommand in ('mask', 'encode'):
            if self.mask_source in needs and needs[self.mask_source][1] is None:
                flag = needs[self.mask_source][0]
                raise InputError(f'--mask {self.mask_source} needs --{flag}')
            extra = [flag for source, (flag, value) in needs.items()
                     if source != self.mask_source and value is not None]
            if extra:
                raise InputError(f'exactly one mask source: --{extra[0]} conflicts with '
                                 f'--mask {self.mask_source}')
        if not 0 <= self.lambda_id <= 3:
            raise InputError(f'--lambda-id must lie in [0, 3], got {self.lambda_id}')
        for path in self.inputs + [self.checkpoint, self.detections, self.annotations,
                                   self.mask_file]:
            if path is not None and not os.path.exists(path):
                raise InputError(f'{path}: no such file')

    @classmethod
    def from_args(cls, args) -> 'RunConfig':
        inputs = getattr(args, 'input', None)
        if isinstance(inputs, str):
            inputs = [inputs]
        return cls(args.command, inputs, getattr(args, 'output', None),
                   getattr(args, 'checkpoint', None), getattr(args, 'mask', 'variance'),
                   getattr(args, 'detections', None), getattr(args, 'annotations', None),
                   getattr(args, 'mask_file', None), getattr(args, 'image_id', None),
                   getattr(args, 'lambda_id', 0),
                   not getattr(args, 'fast', False), getattr(args, 'per_cell_bits', False))


def build_mask(run: RunConfig, image: np.ndarray):
    size = image.shape[:2]
    if run.mask_source == 'variance':
        return variance_mask(image)
    if run.mask_source == 'detections':
        return detection_mask(load_detections(run.detections, run.image_id), size)
    if run.mask_source == 'gt':
        return gt_mask(load_annotations(run.annotations), size)
    return read_mask_ascii(run.mask_file, size)


def _print(out, *lines):
    for line in lines:
        print(line, file=out)


# ---------------------------------------------------------------- subcommands

def cmd_mask(run: RunConfig, out=sys.stdout):
    image = read_image(run.inputs[0])
    m = build_mask(run, image)
    write_mask_ascii(run.output, m)
    root = os.path.splitext(run.output)[0]
    write_bytes(root + '.bin', signal_mask(m))
    _print(out, f'mask {m.shape[0]}x{m.shape[1]}: ' +
           ', '.join(f'level {n} {m.count(n)} cells' for n in (1, 2, 3)))
    return m


def cmd_encode(run: RunConfig, recon_path: str = None, out=sys.stdout):
    """cmd_encode.
        Encode one image to an .sdvc file and print the bit report.
    """
    set_reference_mode(run.reference_mode)
    image = read_image(run.inputs[0])
    m = build_mask(run, image)
    codec, _ = load_checkpoint(run.checkpoint)
    recon, latents, rate = codec.reconstruct(image, m)
    stream = encode_bitstream(latents, m, codec, run.lambda_id)
    write_bytes(run.output, stream.serialize())
    if recon_path is not None:
        write_image(recon_path, recon.image())

    height, width = image.shape[:2]
    sizes = stream.segment_sizes()
    _print(out, f'{run.output}: {len(stream)} bytes, '
                f'{bits_per_pixel(stream, height, width):.6f} bpp')
    for key, bits in rate.per_level.items():
        _print(out, f'  {key[0]}{key[1]}: {8 * sizes[key]:8d} bits coded, {bits:10.1f} estimated')
    if run.per_cell_bits:
        _print(out, 'bits per cell:')
        rows, cols = m.shape
        for row in rate.cell_bits[0][:rows, :cols]:
            _print(out, ' '.join(f'{v:8.1f}' for v in row))
    return stream, recon


def cmd_decode(run: RunConfig, out=sys.stdout):
    with open(run.inputs[0], 'rb') as f:
        stream = Bitstream.parse(f.read())
    with reference_mode(stream.reference_mode):
        codec, _ = load_checkpoint(run.checkpoint)
        latents = decode_bitstream(stream, codec)
        recon = codec.decode_from_latents(latents)
        image = recon.image()
    write_image(run.output, image)
    _print(out, f'{run.output}: {image.shape[0]}x{image.shape[1]}, lambda id {stream.lambda_id}')
    return image


def cmd_train(config_path: Optional[str], output_dir: str, synthetic: bool = False,
              smoke: bool = False, seed: int = None, out=sys.stdout):
    """cmd_train.
        Run the training schedule on synthetic scenes and write
        training_log.csv, phase1/phase2 checkpoints, model.sdhc and proxy.sdhc.
    """
    data = {}
    if config_path is not None:
        model_config, training, data = read_config_file(config_path)
    else:
        model_config, training = ModelConfig.small(), TrainingConfig()
    if smoke:
        options = training.to_dict()
        for key in ('epochs_phase1', 'epochs_phase2', 'proxy_epochs', 'batch_size', 'crop'):
            options.pop(key)
        training = TrainingConfig.smoke(**options)
    if seed is not None:
        options = training.to_dict()
        options['seed'] = seed
        training = TrainingConfig(**options)
    if not synthetic and data.get('source', 'synthetic') != 'synthetic':
        raise InputError('only synthetic training data is supported; pass --synthetic')

    n_scenes = int(data.get('n_scenes', 4 if smoke else 64))
    height = int(data.get('height', 128 if smoke else 256))
    width = int(data.get('width', 256 if smoke else 512))
    dataset = make_synthetic_dataset(n_scenes, training.seed, height, width)

    result = train_schedule(dataset, training, model_config, output_dir=output_dir)
    final_hash = save_checkpoint(os.path.join(output_dir, 'model.sdhc'), result.codec,
                                 {'lambda': training.lmbda, 'hashes': dict(result.hashes)})
    if result.proxy is not None:
        save_checkpoint(os.path.join(output_dir, 'proxy.sdhc'), result.proxy)
    write_text(os.path.join(output_dir, 'run.json'),
               dumps_snapshot({'training': training.to_dict(), 'model': model_config.to_dict(),
                               'hashes': dict(result.hashes)}))
    _print(out, f'trained {len(result.logs)} epochs, model hash {final_hash}')
    return result


def _sweep_point(pair):
    stream_path, table_path = pair
    with open(stream_path, 'rb') as f:
        stream = Bitstream.parse(f.read())
    return (bits_per_pixel(stream, stream.height, stream.width),
            weighted_ap(ClassAPTable.load(table_path)))


def read_sweep(path, threads: int = 1):
    """read_sweep.
        One section per codec. `points` lists bitstream:class-AP-table pairs
        separated by commas; train_loss, train_mask and inf_mask describe the
        codec in the report and `anchor = yes` marks the anchor.
    """
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise InputError(f'{path}: no such sweep file')
    base = os.path.dirname(os.path.abspath(path))
    curves, descriptors, anchor = [], OrderedDict(), None
    for label in parser.sections():
        section = parser[label]
        pairs = []
        for item in section.get('points', '').split(','):
            if not item.strip():
                continue
            try:
                stream_path, table_path = (os.path.join(base, p.strip()) for p in item.split(':'))
            except ValueError:
                raise InputError(f'{path} [{label}]: points entries are bitstream:table pairs')
            pairs.append((stream_path, table_path))
        if threads > 1 and len(pairs) > 1:
            with Pool(min(threads, len(pairs))) as pool:
                points = pool.map(_sweep_point, pairs)
        else:
            points = [_sweep_point(p) for p in pairs]
        curves.append(RateAccuracyCurve(label, points, metric='wAP'))
        descriptors[label] = (section.get('train_loss', '-'), section.get('train_mask', '-'),
                              section.get('inf_mask', '-'))
        if section.getboolean('anchor', fallback=False):
            anchor = label
    return curves, descriptors, anchor


def cmd_eval(curve_paths: List[str], output: str = None, anchor: str = None,
             sweep: str = None, method: str = 'polynomial', out=sys.stdout):
    curves, descriptors = [], {}
    for path in curve_paths:
        curves.extend(read_curves_csv(path))
    if sweep is not None:
        sweep_curves, descriptors, sweep_anchor = read_sweep(sweep, max_threads())
        curves.extend(sweep_curves)
        anchor = anchor or sweep_anchor
    if len(curves) < 2:
        raise InputError(f'eval needs at least two curves, got {len(curves)}')
    labels = [c.label for c in curves]
    if anchor is None:
        anchor = labels[0]
    if anchor not in labels:
        raise InputError(f'anchor {anchor!r} is not among the curves {labels}')
    table = format_bd_table(curves[labels.index(anchor)], curves, descriptors, method)
    out.write(table)
    if output is not None:
        emit_curves(curves, output)
        write_text(os.path.splitext(output)[0] + '.txt', table)
    return table


# ---------------------------------------------------------------- argument parsing

def _add_mask_flags(p):
    p.add_argument('--mask', choices=MASK_SOURCES, default='variance')
    p.add_argument('--detections', help='JSON-lines detection file')
    p.add_argument('--image-id', help='image id to pick from the detection file')
    p.add_argument('--annotations', help='16-bit instance PNG')
    p.add_argument('--mask-file', help='ASCII mask dump')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='salientcodec',
                                     description='saliency-driven hierarchical image codec')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('mask', help='write the saliency mask of an image')
    p.add_argument('input')
    p.add_argument('-o', '--output', required=True)
    _add_mask_flags(p)

    p = sub.add_parser('encode', help='encode an image to an .sdvc bitstream')
    p.add_argument('input')
    p.add_argument('-o', '--output', required=True)
    p.add_argument('--checkpoint', required=True)
    _add_mask_flags(p)
    p.add_argument('--lambda-id', type=int, default=0, choices=range(4))
    mode = p.add_mutually_exclusive_group()
    mode.add_argument('--reference-mode', action='store_true', default=None,
                      help='float64 arithmetic, the default')
    mode.add_argument('--fast', action='store_true')
    p.add_argument('--per-cell-bits', action='store_true')
    p.add_argument('--recon', help='also write the encoder-side reconstruction')

    p = sub.add_parser('decode', help='decode an .sdvc bitstream to PNG')
    p.add_argument('input')
    p.add_argument('-o', '--output', required=True)
    p.add_argument('--checkpoint', required=True)

    p = sub.add_parser('train', help='run the two-phase training schedule')
    p.add_argument('--config')
    p.add_argument('-o', '--output', required=True, help='output directory')
    p.add_argument('--synthetic', action='store_true')
    p.add_argument('--smoke', action='store_true', help='two epochs per phase')
    p.add_argument('--seed', type=int)

    p = sub.add_parser('eval', help='BD-rate report over rate-accuracy curves')
    p.add_argument('curves', nargs='*', help='curve CSV files')
    p.add_argument('--sweep', help='INI file listing bitstream / class AP pairs per codec')
    p.add_argument('--anchor')
    p.add_argument('--method', choices=('polynomial', 'pchip'), default='polynomial')
    p.add_argument('-o', '--output', help='output path for the curve CSV and SVG')
    return parser


def run(args, out=sys.stdout):
    if args.command == 'train':
        if args.config is None and not args.synthetic:
            raise InputError('train needs --config or --synthetic')
        if args.config is not None and not os.path.exists(args.config):
            raise InputError(f'{args.config}: no such file')
        try:
            return cmd_train(args.config, args.output, args.synthetic, args.smoke, args.seed, out)
        except (ValueError, configparser.Error) as e:
            if isinstance(e, CodecError):
                raise
            raise InputError(f'invalid training configuration: {e}')
    if args.command == 'eval':
        for path in args.curves + ([args.sweep] if args.sweep else []):
            if not os.path.exists(path):
                raise InputError(f'{path}: no such file')
        return cmd_eval(args.curves, args.output, args.anchor, args.sweep, args.method, out)
    config = RunConfig.from_args(args)
    if args.command == 'mask':
        return cmd_mask(config, out)
    if args.command == 'encode':
        return cmd_encode(config, args.recon, out)
    return cmd_decode(config, out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args, sys.stdout)
    except CodecError as e:
        print(f'error: {e}', file=sys.stderr)
        return e.exit_code
    except (FileNotFoundError, IsADirectoryError, PermissionError, ValueError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK
