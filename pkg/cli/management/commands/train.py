import json

from cli.services.backend_factory import LLM_KEYS, add_backend_arguments, build_backend
from cli.services.command import HarnessCommand
from keyroom.services.layout import generate_layout
from promptkit.services.composer import get_config
from shaper.domain import DEFAULT_LAYOUT_SEED, CreditPolicy, QLearningParams, ShapingConfig, ShapingMode
from shaper.services.q_learning import DEFAULT_EPISODES, TrainingJob, curves_to_csv, run_jobs, summarize_curves
from shaper.services.sources import CachedVerdictSource, LiveBackendSource, OracleSource

ARMS = ("sparse", "oracle", "cached", "live")
CURVES_CSV = "curves.csv"
SUMMARY_JSON = "summary.json"


class Command(HarnessCommand):
    help = "Tabular Q-learning with and without subgoal shaping; writes learning curves per arm and seed."
    output_name = "training"
    config_keys = LLM_KEYS

    def add_command_arguments(self, parser):
        parser.add_argument("--arm", dest="arms", action="append", choices=ARMS,
                            help="Training arm (repeatable, default sparse and oracle)")
        parser.add_argument("--episodes", type=int, default=DEFAULT_EPISODES)
        parser.add_argument("--seeds", type=int, nargs="+", help="Run seeds (default: --seed and the next four)")
        parser.add_argument("--layout-seed", dest="layout_seed", type=int, default=DEFAULT_LAYOUT_SEED)
        parser.add_argument("--mode", choices=[m.value for m in ShapingMode], default=ShapingMode.ADDITIVE.value)
        parser.add_argument("--bonus", type=float, default=1.0, help="Subgoal bonus in additive mode")
        parser.add_argument("--shaping-gamma", dest="shaping_gamma", type=float, default=0.99,
                            help="Discount used by potential-based shaping")
        parser.add_argument("--credit", choices=[c.value for c in CreditPolicy], default=CreditPolicy.ACHIEVED.value)
        parser.add_argument("--unguarded", action="store_true", help="Pay a subgoal every time it fires")
        parser.add_argument("--alpha", type=float, default=0.1)
        parser.add_argument("--gamma", type=float, default=0.99, help="Learner discount")
        parser.add_argument("--step-cap", dest="step_cap", type=int, default=200)
        parser.add_argument("--verdicts", help="Cached arm: verdict JSONL covering the layout")
        parser.add_argument("--verdict-config", dest="verdict_config", help="Cached arm: configuration to read")
        parser.add_argument("--prompt-config", dest="prompt_config", default="gamescreen-provided",
                            help="Live arm: prompt configuration")
        parser.add_argument("--parallel", type=int, help="Concurrent training runs (CALM_PARALLEL)")
        add_backend_arguments(parser, default="http")

    def run(self, config, out_dir, **options):
        arms = options["arms"] or ["sparse", "oracle"]
        seeds = options["seeds"] or [config["seed"] + i for i in range(5)]
        layout = generate_layout(options["layout_seed"])
        params = QLearningParams(alpha=options["alpha"], gamma=options["gamma"], step_cap=options["step_cap"])

        jobs = []
        for arm in dict.fromkeys(arms):
            shaping = None if arm == "sparse" else self._shaping_config(arm, config, options)
            jobs.extend(TrainingJob(arm=arm, layout=layout, config=shaping, seed=seed,
                                    episodes=options["episodes"], params=params) for seed in seeds)
        curves = run_jobs(jobs, parallel=config["parallel"])

        summary = summarize_curves(curves)
        self.write_file(out_dir / CURVES_CSV, curves_to_csv(curves))
        self.write_file(out_dir / SUMMARY_JSON, json.dumps({
            "layout_seed": options["layout_seed"],
            "episodes": options["episodes"],
            "mode": options["mode"],
            "arms": summary,
        }, indent=2, sort_keys=True) + "\n")
        for arm, stats in summary.items():
            self.stdout.write(
                f"{arm}: median first success at episode {stats['median_episodes_to_first_success']}, "
                f"median success rate over the last {stats['window']} episodes {stats['median_success_rate_last']:.2f}"
            )

    def _shaping_config(self, arm, config, options) -> ShapingConfig:
        if arm == "oracle":
            source = OracleSource()
        elif arm == "cached":
            if not options["verdicts"]:
                raise ValueError("the cached arm needs --verdicts PATH (annotate a collect --enumerate-layout dataset)")
            source = CachedVerdictSource.from_file(options["verdicts"], config_name=options["verdict_config"])
        else:
            self.ensure_cache_table()
            backend = build_backend(options["backend"], config, options)
            source = LiveBackendSource(backend, get_config(options["prompt_config"]))
        return ShapingConfig(
            source=source,
            mode=ShapingMode(options["mode"]),
            subgoal_bonus=options["bonus"],
            gamma=options["shaping_gamma"],
            credit=CreditPolicy(options["credit"]),
            guarded=not options["unguarded"],
        )
