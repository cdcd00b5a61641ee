"""Command-line surface: simulate, learn, eval, sweep, exact, and bench.

Exit codes: 0 success, 1 I/O failure, 2 usage or parse error, 3 learner
non-convergence (outputs are still written).  Every command with a ``--seed``
is bit-deterministic.  ``bench`` runs a (graph, d, k, n, noise, lambda, seed)
grid, one in-process job per cell and seed, with parallelism capped by the
``NOTEARS_THREADS`` environment variable (default: physical cores).
"""

import argparse
import concurrent.futures
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .evaluation import compare_graphs, exact_global_search, roc_sweep
from .io import CsvFormatError, load_matrix, metrics_json, save_matrix
from .learner import NotearsConfig, notears_fit
from .scoring import penalized_score
from .simulation import GraphSpec, SemSpec, assign_weights, sample_er_dag, sample_sf_dag, sample_sem

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


def _load(path):
    try:
        return load_matrix(path)
    except CsvFormatError:
        raise
    except OSError as exc:
        raise _IoFailure(str(exc)) from exc


class _IoFailure(RuntimeError):
    pass


def _simulate_pair(kind, d, k, n, noise, seed):
    graph_spec = GraphSpec(kind=kind, d=d, k=k, seed=seed)
    sem_spec = SemSpec(noise=noise, seed=seed)
    B = sample_er_dag(graph_spec) if kind == "er" else sample_sf_dag(graph_spec)
    W = assign_weights(B, sem_spec)
    X = sample_sem(W, n, sem_spec)
    return W, X


def cmd_simulate(args):
    W, X = _simulate_pair(args.graph, args.d, args.k, args.n, args.noise, args.seed)
    save_matrix(args.out_w, W)
    save_matrix(args.out_x, X)
    print(
        f"simulated {args.graph} graph: d={args.d} edges={int((W != 0).sum())} "
        f"n={args.n} seed={args.seed}"
    )
    return EXIT_OK


def cmd_learn(args):
    X = _load(args.x)
    if args.center:
        X = X - X.mean(axis=0)
    cfg = NotearsConfig(lam=args.lam, omega=args.omega)
    result = notears_fit(X, cfg)
    save_matrix(args.out, result.w_hat)
    if args.out_ecp:
        save_matrix(args.out_ecp, result.w_ecp)
    if args.out_trace:
        with open(args.out_trace, "w") as handle:
            handle.write("t,rho,alpha,acyclicity,score\n")
            for rec in result.trace:
                handle.write(
                    f"{rec.t},{rec.rho:.17g},{rec.alpha:.17g},"
                    f"{rec.acyclicity:.17g},{rec.score:.17g}\n"
                )
    score = penalized_score(result.w_hat, X, args.lam)
    print(
        f"acyclicity={result.acyclicity_final:.3e} score={score:.6f} "
        f"edges={int((result.w_hat != 0).sum())} dual_iters={result.n_dual_iters}"
        + ("" if result.converged else " (NOT CONVERGED)")
    )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_eval(args):
    B_true = _load(args.w_true)
    B_est = _load(args.w_est)
    if B_true.shape != B_est.shape:
        print(
            f"error: matrices differ in shape: {B_true.shape} vs {B_est.shape}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    payload = metrics_json(compare_graphs(B_true, B_est))
    print(payload)
    if args.json:
        with open(args.json, "w") as handle:
            handle.write(payload + "\n")
    return EXIT_OK


def cmd_sweep(args):
    W = _load(args.w_ecp)
    B_true = _load(args.w_true)
    if W.shape != B_true.shape:
        print(
            f"error: matrices differ in shape: {W.shape} vs {B_true.shape}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    points, sorted_weights = roc_sweep(W, B_true)
    with open(args.out, "w") as handle:
        handle.write("omega,fdr,tpr,is_dag,nnz\n")
        for pt in points:
            handle.write(
                f"{pt.omega:.17g},{pt.fdr:.17g},{pt.tpr:.17g},"
                f"{int(pt.is_dag)},{pt.nnz}\n"
            )
    if args.weights_out:
        save_matrix(args.weights_out, sorted_weights.reshape(-1, 1))
    print(f"swept {len(points)} thresholds -> {args.out}")
    return EXIT_OK


def cmd_exact(args):
    X = _load(args.x)
    try:
        B_star, W_star, score_star = exact_global_search(X, args.lam, args.max_d)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    save_matrix(args.out_b, B_star)
    save_matrix(args.out_w, W_star)
    payload = {"score_star": score_star, "edges": int(B_star.sum())}
    if args.w_hat:
        W_hat = _load(args.w_hat)
        payload["gap"] = penalized_score(W_hat, X, args.lam) - score_star
    print(json.dumps(payload))
    return EXIT_OK


@dataclass
class RunConfig:
    """Benchmark grid; serializable to/from a JSON config file."""

    graphs: list = field(default_factory=lambda: ["er"])
    d: list = field(default_factory=lambda: [10, 20])
    k: list = field(default_factory=lambda: [2])
    n: list = field(default_factory=lambda: [20, 1000])
    noise: list = field(default_factory=lambda: ["gauss"])
    lam: list = field(default_factory=lambda: [0.1])
    omega: float = 0.3
    seeds: list = field(default_factory=lambda: list(range(1, 11)))
    out_dir: str = "bench_out"

    def __post_init__(self):
        for name in ("graphs", "d", "k", "n", "noise", "lam", "seeds"):
            if not getattr(self, name):
                raise ValueError(f"grid dimension {name!r} must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")

    @classmethod
    def from_json(cls, path):
        with open(path) as handle:
            raw = json.load(handle)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


_BENCH_COLUMNS = (
    "graph,d,k,n,noise,lambda,seed,status,shd,tpr,fdr,fpr,nnz,"
    "acyclicity,dual_iters,converged,runtime_s"
)


def _bench_job(job):
    kind, d, k, n, noise, lam, omega, seed = job
    key = (kind, d, k, n, noise, lam, seed)
    start = time.perf_counter()
    try:
        W_true, X = _simulate_pair(kind, d, k, n, noise, seed)
        result = notears_fit(X, NotearsConfig(lam=lam, omega=omega))
        metrics = compare_graphs(W_true, result.w_hat)
        runtime = time.perf_counter() - start
        return key, {
            "status": "ok",
            "shd": metrics.shd,
            "tpr": metrics.tpr,
            "fdr": metrics.fdr,
            "fpr": metrics.fpr,
            "nnz": metrics.nnz,
            "acyclicity": result.acyclicity_final,
            "dual_iters": result.n_dual_iters,
            "converged": int(result.converged),
            "runtime_s": runtime,
        }
    except Exception as exc:  # record the failure, keep the grid going
        return key, {"status": f"error: {type(exc).__name__}: {exc}"}


def _bench_workers():
    import psutil

    default = psutil.cpu_count(logical=False) or os.cpu_count() or 1
    raw = os.environ.get("NOTEARS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, default)


def _write_bench_tables(out_dir, rows):
    results_path = os.path.join(out_dir, "results.csv")
    with open(results_path, "w") as handle:
        handle.write(_BENCH_COLUMNS + "\n")
        for key, rec in rows:
            kind, d, k, n, noise, lam, seed = key
            if rec["status"] == "ok":
                handle.write(
                    f"{kind},{d},{k},{n},{noise},{lam:.17g},{seed},ok,"
                    f"{rec['shd']},{rec['tpr']:.17g},{rec['fdr']:.17g},"
                    f"{rec['fpr']:.17g},{rec['nnz']},{rec['acyclicity']:.17g},"
                    f"{rec['dual_iters']},{rec['converged']},{rec['runtime_s']:.6f}\n"
                )
            else:
                status = rec["status"].replace(",", ";")
                handle.write(f"{kind},{d},{k},{n},{noise},{lam:.17g},{seed},{status}"
                             + ",," * 5 + ",,,,\n")

    summary_path = os.path.join(out_dir, "summary.csv")
    cells = {}
    for key, rec in rows:
        if rec["status"] != "ok":
            continue
        cells.setdefault(key[:-1], []).append(rec)
    with open(summary_path, "w") as handle:
        handle.write(
            "graph,d,k,n,noise,lambda,runs,shd_mean,shd_stderr,tpr_mean,"
            "tpr_stderr,fdr_mean,fdr_stderr,nnz_mean,runtime_mean_s\n"
        )
        for cell in sorted(cells):
            recs = cells[cell]
            m = len(recs)

            def stats(name):
                vals = np.array([r[name] for r in recs], dtype=float)
                stderr = vals.std(ddof=1) / np.sqrt(m) if m > 1 else 0.0
                return vals.mean(), stderr

            shd_m, shd_se = stats("shd")
            tpr_m, tpr_se = stats("tpr")
            fdr_m, fdr_se = stats("fdr")
            nnz_m, _ = stats("nnz")
            rt_m, _ = stats("runtime_s")
            kind, d, k, n, noise, lam = cell
            handle.write(
                f"{kind},{d},{k},{n},{noise},{lam:.17g},{m},{shd_m:.6g},"
                f"{shd_se:.6g},{tpr_m:.6g},{tpr_se:.6g},{fdr_m:.6g},"
                f"{fdr_se:.6g},{nnz_m:.6g},{rt_m:.6g}\n"
            )
    return results_path, summary_path


def _render_bench_plot(out_dir, rows):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cells = {}
    for key, rec in rows:
        if rec["status"] != "ok":
            continue
        kind, d, k, n, noise, lam, _ = key
        cells.setdefault((kind, k, n, noise, lam), {}).setdefault(d, []).append(
            rec["shd"]
        )
    fig, ax = plt.subplots(figsize=(6, 4))
    for label_key in sorted(cells):
        by_d = cells[label_key]
        ds = sorted(by_d)
        means = [np.mean(by_d[d]) for d in ds]
        errs = [
            np.std(by_d[d], ddof=1) / np.sqrt(len(by_d[d])) if len(by_d[d]) > 1 else 0.0
            for d in ds
        ]
        kind, k, n, noise, lam = label_key
        ax.errorbar(ds, means, yerr=errs, marker="o",
                    label=f"{kind}-{k} n={n} {noise} lam={lam}")
    ax.set_xlabel("d")
    ax.set_ylabel("SHD")
    ax.legend(fontsize=7)
    fig.tight_layout()
    path = os.path.join(out_dir, "shd.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def cmd_bench(args):
    if args.config:
        cfg = RunConfig.from_json(args.config)
    else:
        cfg = RunConfig()
    if args.graphs:
        cfg.graphs = args.graphs
    if args.d_list:
        cfg.d = args.d_list
    if args.k_list:
        cfg.k = args.k_list
    if args.n_list:
        cfg.n = args.n_list
    if args.noise_list:
        cfg.noise = args.noise_list
    if args.lambda_list:
        cfg.lam = args.lambda_list
    if args.omega is not None:
        cfg.omega = args.omega
    if args.seeds:
        cfg.seeds = args.seeds
    if args.out_dir:
        cfg.out_dir = args.out_dir
    os.makedirs(cfg.out_dir, exist_ok=True)

    jobs = [
        (kind, d, k, n, noise, lam, cfg.omega, seed)
        for kind in cfg.graphs
        for d in cfg.d
        for k in cfg.k
        for n in cfg.n
        for noise in cfg.noise
        for lam in cfg.lam
        for seed in cfg.seeds
    ]
    workers = min(_bench_workers(), len(jobs))
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_job, jobs))
    else:
        rows = [_bench_job(job) for job in jobs]
    rows.sort(key=lambda item: item[0])

    results_path, summary_path = _write_bench_tables(cfg.out_dir, rows)
    failures = sum(1 for _, rec in rows if rec["status"] != "ok")
    print(
        f"bench: {len(rows)} runs ({failures} failed) -> {results_path}, {summary_path}"
    )
    if args.plot:
        try:
            plot_path = _render_bench_plot(cfg.out_dir, rows)
        except ImportError:
            print("error: --plot requires matplotlib", file=sys.stderr)
            return EXIT_IO
        print(f"plot -> {plot_path}")
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="notears",
        description="Sparse DAG structure learning via continuous optimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sample a random weighted DAG and SEM data")
    sim.add_argument("--graph", choices=["er", "sf"], required=True)
    sim.add_argument("--d", type=int, required=True)
    sim.add_argument("--k", type=float, default=2)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--noise", choices=["gauss", "exp", "gumbel"], default="gauss")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out-w", required=True, help="weighted adjacency output CSV")
    sim.add_argument("--out-x", required=True, help="data matrix output CSV")
    sim.set_defaults(func=cmd_simulate)

    learn = sub.add_parser("learn", help="fit a sparse DAG to a data CSV")
    learn.add_argument("--x", required=True, help="input data CSV (n rows, d columns)")
    learn.add_argument("--lambda", dest="lam", type=float, default=0.1)
    learn.add_argument("--omega", type=float, default=0.3)
    learn.add_argument("--center", action="store_true",
                       help="subtract column means before fitting")
    learn.add_argument("--out", required=True, help="thresholded estimate CSV")
    learn.add_argument("--out-ecp", help="also write the unthresholded solution")
    learn.add_argument("--out-trace", help="also write the dual-iteration trace CSV")
    learn.set_defaults(func=cmd_learn)

    ev = sub.add_parser("eval", help="compare an estimated graph to the truth")
    ev.add_argument("--w-true", required=True)
    ev.add_argument("--w-est", required=True)
    ev.add_argument("--json", help="also write the metrics JSON to this file")
    ev.set_defaults(func=cmd_eval)

    sweep = sub.add_parser("sweep", help="threshold sweep of a learned matrix")
    sweep.add_argument("--w-ecp", required=True)
    sweep.add_argument("--w-true", required=True)
    sweep.add_argument("--out", required=True, help="sweep table CSV")
    sweep.add_argument("--weights-out", help="sorted |weights| column CSV")
    sweep.set_defaults(func=cmd_sweep)

    exact = sub.add_parser("exact", help="exhaustive global optimum (small d)")
    exact.add_argument("--x", required=True)
    exact.add_argument("--lambda", dest="lam", type=float, default=0.1)
    exact.add_argument("--max-d", type=int, default=7)
    exact.add_argument("--out-b", required=True, help="optimal support CSV")
    exact.add_argument("--out-w", required=True, help="optimal weights CSV")
    exact.add_argument("--w-hat", help="learned estimate; adds the score gap")
    exact.set_defaults(func=cmd_exact)

    bench = sub.add_parser("bench", help="run the experiment grid")
    bench.add_argument("--config", help="JSON RunConfig file")
    bench.add_argument("--graphs", nargs="+", choices=["er", "sf"])
    bench.add_argument("--d-list", nargs="+", type=int)
    bench.add_argument("--k-list", nargs="+", type=float)
    bench.add_argument("--n-list", nargs="+", type=int)
    bench.add_argument("--noise-list", nargs="+", choices=["gauss", "exp", "gumbel"])
    bench.add_argument("--lambda-list", nargs="+", type=float)
    bench.add_argument("--omega", type=float)
    bench.add_argument("--seeds", nargs="+", type=int)
    bench.add_argument("--out-dir")
    bench.add_argument("--plot", action="store_true")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_IoFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
