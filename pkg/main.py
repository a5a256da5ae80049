import argparse
import logging
import os
import sys
from dataclasses import replace

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from database import DatabaseManager
from experiments import VARIANTS, ConfigError, ExperimentConfig, export_scatter_data, load_config, run_experiment
from reporting import ReportGenerator
from synthetic import SynthConfig, analytic_oracle_hit_ratio, export_synthetic, noise_for_hit_ratio, oracle_hit_ratio

logger = logging.getLogger("main")

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


def banner(title: str):
    print("=" * 70)
    print(title)
    print("=" * 70)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Cross-market fusion forecasting experiments')
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    commands = parser.add_subparsers(dest='command', required=True)

    def common(sub, config_required=True):
        sub.add_argument('--config', '-c', required=config_required, help='Experiment config file (INI)')
        sub.add_argument('--seed', type=int, help='Override the global seed')
        sub.add_argument('--out', '-o', help='Output directory')
        sub.add_argument('--jobs', '-j', type=int, help='Worker processes for grid cells')

    common(commands.add_parser('run', help='Run the full experiment grid'))
    common(commands.add_parser('scatter', help='Export feature/target pairs with OLS fits'))

    synth = commands.add_parser('synth', help='Write a coupled synthetic market pair as CSV')
    common(synth, config_required=False)
    synth.add_argument('--n-days', type=int, help='Number of business days')
    synth.add_argument('--coupling', type=float, help='Spillover coefficient')
    synth.add_argument('--noise-sd', type=float, help='Domestic noise level')
    synth.add_argument('--hit-ratio', type=float, help='Pick the noise level giving this best achievable hit ratio')

    tune = commands.add_parser('tune', help='One hyperparameter search for a single grid cell')
    common(tune)
    tune.add_argument('--foreign', help='Foreign index id (default: first configured)')
    tune.add_argument('--window', help='Window id (default: first configured)')
    tune.add_argument('--scaling', type=int, default=0, help='Index of the scaling range (default: 0)')
    tune.add_argument('--variant', default='early_fusion', choices=sorted(VARIANTS))
    return parser


def apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    if args.seed is not None:
        changes['seed'] = args.seed
    if args.jobs is not None:
        changes['jobs'] = args.jobs
    if args.out is not None:
        changes['out_dir'] = args.out
    return replace(cfg, **changes) if changes else cfg


def search_dimensions(cfg: ExperimentConfig):
    return {variant: cfg.search_space(variant).names for variant in cfg.variants}


def run_grid(cfg: ExperimentConfig) -> int:
    reporter = ReportGenerator(cfg.out_dir)
    with DatabaseManager(os.path.join(cfg.out_dir, "runs.db")) as db:
        grid = run_experiment(cfg, store=db, checkpoint_dir=os.path.join(cfg.out_dir, "checkpoints"))
    files = reporter.generate_run_report(grid, search_dimensions(cfg))

    print(reporter.render_table(grid))
    print(f"Report: {files['text'][0]}")
    failed = len(grid.failed_cells)
    if failed:
        print(f"{failed} of {len(grid.cells)} cell(s) failed")
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = apply_overrides(load_config(args.config), args)
    banner(f"EXPERIMENT GRID - {len(cfg.foreign_ids)} index(es), {len(cfg.windows)} window(s), "
           f"{len(cfg.scaling_ranges)} scaling(s), {len(cfg.variants)} variant(s)")
    return run_grid(cfg)


def cmd_tune(args) -> int:
    cfg = apply_overrides(load_config(args.config), args)
    windows = [w for w in cfg.windows if args.window in (None, w.window_id)]
    if not windows:
        raise ConfigError(f"unknown window {args.window!r}")
    if not 0 <= args.scaling < len(cfg.scaling_ranges):
        raise ConfigError(f"scaling index {args.scaling} out of range")
    changes = dict(windows=tuple(windows[:1]), scaling_ranges=(cfg.scaling_ranges[args.scaling],), variants=(args.variant,))
    if cfg.synthetic is None:
        foreign = [f for f in cfg.foreign if args.foreign in (None, f[0])]
        if not foreign:
            raise ConfigError(f"unknown foreign index {args.foreign!r}")
        changes['foreign'] = tuple(foreign[:1])
    cfg = replace(cfg, **changes)
    banner(f"TUNE - {cfg.foreign_ids[0]} / {cfg.windows[0].window_id} / {cfg.scaling_ranges[0]} / {args.variant}")
    return run_grid(cfg)


def cmd_scatter(args) -> int:
    cfg = apply_overrides(load_config(args.config), args)
    banner("SCATTER EXPORT")
    files = export_scatter_data(cfg)
    print(f"{len(files)} file(s) written to {cfg.out_dir}")
    return EXIT_OK


def cmd_synth(args) -> int:
    synth = SynthConfig()
    out_dir = args.out or "synthetic_data"
    if args.config:
        cfg = load_config(args.config)
        synth = cfg.synthetic or synth
        out_dir = args.out or cfg.out_dir
    changes = {}
    if args.n_days is not None:
        changes['n_days'] = args.n_days
    if args.coupling is not None:
        changes['coupling'] = args.coupling
    if args.noise_sd is not None:
        changes['noise_sd'] = args.noise_sd
    if args.seed is not None:
        changes['seed'] = args.seed
    synth = replace(synth, **changes)
    if args.hit_ratio is not None:
        synth = replace(synth, noise_sd=noise_for_hit_ratio(args.hit_ratio, synth.coupling, synth.foreign_sd))

    banner("SYNTHETIC COUPLED MARKETS")
    paths = export_synthetic(synth, out_dir)
    oracle = {
        "config": synth.to_dict(),
        "oracle_hit_ratio": oracle_hit_ratio(synth),
        "analytic_hit_ratio": analytic_oracle_hit_ratio(synth.coupling, synth.foreign_sd, synth.noise_sd),
        "files": {market_id: os.path.basename(path) for market_id, path in paths.items()},
    }
    ReportGenerator(out_dir).save_json(oracle, "synthetic.json")
    for market_id, path in paths.items():
        print(f"  {market_id}: {path}")
    print(f"Best achievable hit ratio: {oracle['oracle_hit_ratio']:.4f} (closed form {oracle['analytic_hit_ratio']:.4f})")
    return EXIT_OK


COMMANDS = {'run': cmd_run, 'tune': cmd_tune, 'scatter': cmd_scatter, 'synth': cmd_synth}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ValueError, RuntimeError, OSError) as e:
        logger.error("%s", e)
        print(f"Error: {e}")
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
