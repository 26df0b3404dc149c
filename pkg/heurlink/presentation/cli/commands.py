"""
Subcomandos de la línea de comandos.
Cada comando valida todas sus entradas antes de escribir cualquier salida y
devuelve el código de salida.
"""
import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.sparse.csgraph import connected_components

from heurlink import __version__
from heurlink.application.services.graph_ops import (
    estimate_spectral_radius,
    normalize,
    set_num_threads,
)
from heurlink.application.services.heuristics import score_heuristic, verify_heuristic
from heurlink.application.services.metrics import evaluate_metric
from heurlink.application.services.model import init_params, materialize_formulation, score_pairs
from heurlink.application.services.sampling import sample_negatives
from heurlink.application.services.splits import split_edges, training_graph
from heurlink.application.services.synthetic import (
    generate_hexagonal,
    generate_random_graph,
    generate_triangular,
    split_synthetic,
)
from heurlink.application.use_cases.benchmark import run_forward_benchmark
from heurlink.application.use_cases.gradcheck import finite_difference_check
from heurlink.application.use_cases.training import fit, make_validation_hook
from heurlink.domain.entities.models import (
    Dataset,
    EdgeSplit,
    HeuristicId,
    HeuristicSpec,
    LinkBatch,
    LossKind,
    ModelConfig,
    OperatorKind,
    SparseGraph,
)
from heurlink.domain.exceptions import (
    ConfigError,
    DimensionMismatchError,
    VerificationError,
)
from heurlink.infrastructure.config.settings import (
    DEFAULT_SEED,
    DEFAULT_THREADS,
    DEFAULT_TRUNCATION,
    GRADCHECK_TOLERANCE,
    VERIFY_TOLERANCE,
)
from heurlink.infrastructure.persistence.checkpoints import (
    export_interpretability,
    interpretability_document,
    load_checkpoint,
    save_checkpoint,
)
from heurlink.infrastructure.persistence.datasets import (
    load_dataset,
    load_edge_list,
    load_features,
    save_edge_list,
)
from heurlink.infrastructure.persistence.history import save_history
from heurlink.infrastructure.persistence.splits import load_split, save_split
from heurlink.presentation.cli.formatters import (
    print_table,
    score_rows,
    write_csv,
    write_json,
)
from heurlink.presentation.schemas.run_config import RunConfig, load_run_config

logger = logging.getLogger(__name__)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser cuyos errores de uso se convierten en ConfigError (código 1)."""

    def error(self, message: str):
        raise ConfigError(f"Uso inválido: {message}", details=self.format_usage().strip())


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"lista de enteros inválida: {text}") from exc


def _pair(text: str) -> Tuple[int, int]:
    fields = text.replace(":", ",").split(",")
    if len(fields) != 2:
        raise argparse.ArgumentTypeError(f"par inválido '{text}', use i,j")
    try:
        return int(fields[0]), int(fields[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"par inválido '{text}'") from exc


def _resolve_seed(args: argparse.Namespace, fallback: int) -> int:
    return fallback if args.seed is None else args.seed


def _spec_from_args(args: argparse.Namespace) -> HeuristicSpec:
    try:
        return HeuristicSpec(
            method=HeuristicId(args.method),
            gamma=args.gamma,
            phi=args.phi,
            alpha=args.alpha,
            order=args.order,
        )
    except ValidationError as exc:
        raise ConfigError("Parámetros de heurística inválidos", details=str(exc)) from exc


def _all_non_edges(g: SparseGraph) -> np.ndarray:
    rows, cols = np.triu_indices(g.num_nodes, k=1)
    adjacency = g.adjacency()
    keep = np.asarray(adjacency[rows, cols]).ravel() == 0
    return np.stack([rows[keep], cols[keep]], axis=1).astype(np.int64)


def _read_pairs(path: str) -> np.ndarray:
    pairs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            pairs.append(_pair(",".join(line.replace(",", " ").split())))
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


# ---------------------------------------------------------------- heuristic

def cmd_heuristic(args: argparse.Namespace) -> int:
    """Puntúa pares con una heurística de la formulación unificada."""
    spec = _spec_from_args(args)
    g = load_edge_list(args.graph, args.num_nodes)
    if args.all_nonedges:
        pairs = _all_non_edges(g)
    elif args.pairs_file:
        pairs = _read_pairs(args.pairs_file)
    else:
        pairs = np.array(args.pairs, dtype=np.int64).reshape(-1, 2)

    scores = score_heuristic(g, spec, pairs)
    deviation = None
    if args.verify:
        deviation = verify_heuristic(g, spec, pairs)
        if deviation["max_deviation"] > VERIFY_TOLERANCE:
            raise VerificationError(
                f"La heurística {spec.method.value} no coincide con su oráculo",
                details=f"desviación máxima {deviation['max_deviation']:.3e}",
            )

    rows = score_rows(pairs, scores)
    if args.out:
        write_csv(rows, ["src", "dst", "score"], args.out)
        logger.info(f"{len(rows)} puntuaciones escritas en {args.out}")
    else:
        print_table(rows, ["src", "dst", "score"])
    if deviation is not None:
        print_table([dict(deviation)])
    return 0


# ---------------------------------------------------------------- datos

def _prepare_data(config: RunConfig, seed: int) -> Tuple[Dataset, EdgeSplit]:
    section = config.dataset
    if section.synthetic is not None:
        generator = generate_triangular if section.synthetic == "triangular" else generate_hexagonal
        dataset = generator(section.size, seed) if section.size else generator(seed=seed)
        split = (
            load_split(section.split) if section.split
            else split_synthetic(dataset, section.valid_ratio, section.test_ratio, seed)
        )
    else:
        dataset = load_dataset(section.edges, section.features, section.num_nodes)
        split = (
            load_split(section.split) if section.split
            else split_edges(dataset.graph, section.valid_ratio, section.test_ratio, seed)
        )
    if split.num_nodes != dataset.graph.num_nodes:
        raise DimensionMismatchError(
            "La partición no corresponde al grafo",
            details=f"N partición={split.num_nodes}, N grafo={dataset.graph.num_nodes}",
        )
    if dataset.num_features != config.model.input_dim:
        raise DimensionMismatchError(
            "model.input_dim no coincide con las características del dataset",
            details=f"input_dim={config.model.input_dim}, F={dataset.num_features}",
        )
    return dataset, split


def _train_config(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates: Dict[str, Any] = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.epochs is not None:
        if args.epochs < 0:
            raise ConfigError("--epochs debe ser >= 0")
        updates["epochs"] = args.epochs
    if not updates:
        return config
    return config.model_copy(update={"train": config.train.model_copy(update=updates)})


def cmd_train(args: argparse.Namespace) -> int:
    """Entrena HL-GNN y guarda el mejor checkpoint y el historial."""
    config = _train_config(load_run_config(args.config), args)
    seed = config.train.seed
    dataset, split = _prepare_data(config, seed)

    g_train = training_graph(split)
    hook = None
    if split.valid_pos.shape[0] and split.valid_neg.shape[0]:
        hook = make_validation_hook(
            g_train, dataset.features, split.valid_pos, split.valid_neg, config.train.eval_metric
        )
    result = fit(g_train, dataset.features, split.train, config.model, config.train, eval_hook=hook)

    save_checkpoint(result.params, args.out_checkpoint)
    if args.history:
        save_history(result.history, args.history)
    if args.out_split:
        save_split(split, args.out_split)

    rows = [{
        "best_epoch": result.best_epoch,
        "val_metric": result.best_metric,
        "metric": config.train.eval_metric,
    }]
    if split.test_pos.shape[0] and split.test_neg.shape[0]:
        report = evaluate_metric(
            config.eval.metric,
            score_pairs(result.params, g_train, dataset.features, split.test_pos),
            score_pairs(result.params, g_train, dataset.features, split.test_neg),
            seed=split.seed,
        )
        rows[0]["test_" + config.eval.metric] = report.value
    print_table(rows)
    return 0


# ---------------------------------------------------------------- evaluación

def cmd_eval(args: argparse.Namespace) -> int:
    """Evalúa un checkpoint sobre una partición guardada."""
    split = load_split(args.split)
    g = training_graph(split)
    params = load_checkpoint(args.checkpoint, g)
    features = load_features(args.features, g.num_nodes) if args.features else None
    positives, negatives = split.partition(args.partition)

    report = evaluate_metric(
        args.metric,
        score_pairs(params, g, features, positives),
        score_pairs(params, g, features, negatives),
        seed=split.seed,
    )
    document = report.model_dump(by_alias=True)
    write_json(document, args.out)
    return 0


def cmd_recover(args: argparse.Namespace) -> int:
    """Exporta la heurística generalizada de un checkpoint."""
    graph = None
    if args.split:
        graph = training_graph(load_split(args.split))
    elif args.graph:
        graph = load_edge_list(args.graph)
    params = load_checkpoint(args.checkpoint, graph)
    formulation = materialize_formulation(params, graph, include_dense=args.dense)

    if args.out:
        export_interpretability(formulation, args.out)
        return 0
    document = interpretability_document(formulation)
    rows = [
        {"layer": layer, "beta": beta, **(document["alphas"][layer - 1] if layer else {})}
        for layer, beta in enumerate(document["betas"])
    ]
    print_table(rows, ["layer", "beta", "rs", "cs", "sym"])
    return 0


# ---------------------------------------------------------------- gradcheck

def _default_gradcheck_instance(seed: int):
    g = generate_random_graph(12, 20, seed=seed)
    features = np.random.default_rng(seed).standard_normal((g.num_nodes, 4))
    cfg = ModelConfig(
        depth=3,
        hidden_dim=4,
        input_dim=4,
        use_preprocessing=True,
        use_node_embeddings=True,
        embedding_dim=3,
        mlp_layers=2,
        mlp_hidden_dim=6,
        beta_init="random",
        dropout_rate=0.0,
    )
    return g, features, cfg


def cmd_gradcheck(args: argparse.Namespace) -> int:
    """Compara gradientes analíticos con diferencias centrales."""
    seed = _resolve_seed(args, DEFAULT_SEED)
    if args.config:
        config = load_run_config(args.config)
        dataset, _ = _prepare_data(config, seed)
        g, features = dataset.graph, dataset.features
        cfg = config.model.model_copy(update={"precision": "float64"})
    else:
        g, features, cfg = _default_gradcheck_instance(seed)

    params = init_params(cfg, g, seed=seed)
    positives = g.edge_list()[: args.batch]
    negatives = sample_negatives(g, positives, 1, seed)
    batch = LinkBatch(positives=positives, negatives=negatives.pairs, owners=negatives.owners)

    losses = [LossKind(args.loss)] if args.loss != "both" else [LossKind.AUC, LossKind.BCE]
    rows = []
    worst = 0.0
    for kind in losses:
        result = finite_difference_check(params, g, features, batch, h=args.step, loss=kind, seed=seed)
        for group, error in result["max_rel_error"].items():
            rows.append({
                "loss": kind.value,
                "group": group,
                "entries": result["checked_entries"][group],
                "max_rel_error": error,
            })
            worst = max(worst, error)
    print_table(rows)
    if worst > GRADCHECK_TOLERANCE:
        raise VerificationError(
            "El gradiente analítico no coincide con las diferencias finitas",
            details=f"error relativo máximo {worst:.3e}",
        )
    return 0


# ---------------------------------------------------------------- datos sintéticos

def cmd_synth(args: argparse.Namespace) -> int:
    """Genera un dataset sintético y su partición."""
    seed = _resolve_seed(args, DEFAULT_SEED)
    generator = generate_triangular if args.kind == "triangular" else generate_hexagonal
    if args.size is not None and args.size < 1:
        raise ConfigError("--size debe ser >= 1")
    dataset = generator(args.size, seed) if args.size else generator(seed=seed)
    split = split_synthetic(dataset, args.valid_ratio, args.test_ratio, seed)

    out_dir = Path(args.out_dir)
    save_edge_list(dataset.graph, out_dir / f"{args.kind}.edges")
    save_split(split, out_dir / f"{args.kind}_split.json")
    print_table([{
        "kind": args.kind,
        "N": dataset.graph.num_nodes,
        "M": dataset.graph.num_edges,
        "train": split.train.shape[0],
        "valid": split.valid_pos.shape[0],
        "test": split.test_pos.shape[0],
    }])
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    """Parte un grafo en entrenamiento, validación y prueba."""
    seed = _resolve_seed(args, DEFAULT_SEED)
    g = load_edge_list(args.graph, args.num_nodes)
    split = split_edges(g, args.valid_ratio, args.test_ratio, seed)
    save_split(split, args.out)
    print_table([{
        "N": g.num_nodes,
        "M": g.num_edges,
        "train": split.train.shape[0],
        "valid": split.valid_pos.shape[0],
        "test": split.test_pos.shape[0],
        "seed": seed,
    }])
    return 0


def cmd_info(args: argparse.Namespace) -> int:
    """Resumen del grafo: tamaño, grados, componentes y radio espectral de Ã_sym."""
    g = load_edge_list(args.graph, args.num_nodes)
    degrees = g.degrees_with_loops - 1
    components, _ = connected_components(g.adjacency(), directed=False)
    radius = estimate_spectral_radius(normalize(g, OperatorKind.SYMMETRIC), seed=_resolve_seed(args, 0))
    print_table([{
        "N": g.num_nodes,
        "M": g.num_edges,
        "min_degree": int(degrees.min()) if g.num_nodes else 0,
        "max_degree": int(degrees.max()) if g.num_nodes else 0,
        "mean_degree": float(degrees.mean()) if g.num_nodes else 0.0,
        "isolated": int(np.sum(degrees == 0)),
        "components": int(components),
        "rho_sym": radius,
    }])
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    """Mide el tiempo de la propagación variando L, M y F."""
    seed = _resolve_seed(args, DEFAULT_SEED)
    rows = run_forward_benchmark(
        depths=args.depths,
        edge_counts=args.sizes,
        feature_dims=args.features,
        num_nodes=args.nodes,
        repeats=args.repeats,
        seed=seed,
    )
    columns = ["factor", "L", "N", "M", "F", "threads", "seconds"]
    if args.out:
        write_csv(rows, columns, args.out)
    print_table(rows, columns)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> CliParser:
    """Parser con un subcomando por operación."""
    common = CliParser(add_help=False)
    common.add_argument("--threads", type=int, default=DEFAULT_THREADS, help="Hilos para SpMM (1 = reproducible)")
    common.add_argument("--seed", type=int, default=None, help="Semilla de todas las fuentes aleatorias")

    parser = CliParser(prog="heurlink", description="Predicción de enlaces con heurísticas unificadas y HL-GNN")
    parser.add_argument("--version", action="version", version=f"heurlink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    heuristic = sub.add_parser("heuristic", parents=[common], help="Puntuar pares con una heurística")
    heuristic.add_argument("--graph", required=True)
    heuristic.add_argument("--num-nodes", type=int, default=None)
    heuristic.add_argument("--method", required=True, choices=[h.value for h in HeuristicId])
    targets = heuristic.add_mutually_exclusive_group(required=True)
    targets.add_argument("--pairs", nargs="+", type=_pair, help="Pares i,j")
    targets.add_argument("--pairs-file", help="Archivo con un par por línea")
    targets.add_argument("--all-nonedges", action="store_true")
    heuristic.add_argument("--gamma", type=float, default=0.5)
    heuristic.add_argument("--phi", type=float, default=0.5)
    heuristic.add_argument("--alpha", type=float, default=0.5)
    heuristic.add_argument("--order", type=int, default=DEFAULT_TRUNCATION)
    heuristic.add_argument("--verify", action="store_true", help="Comparar con los oráculos (N <= 60)")
    heuristic.add_argument("--out", default=None, help="CSV src,dst,score")
    heuristic.set_defaults(handler=cmd_heuristic)

    train = sub.add_parser("train", parents=[common], help="Entrenar HL-GNN")
    train.add_argument("--config", required=True)
    train.add_argument("--out-checkpoint", required=True)
    train.add_argument("--history", default=None, help="CSV epoch,loss,val_metric")
    train.add_argument("--out-split", default=None, help="Guardar la partición usada")
    train.add_argument("--epochs", type=int, default=None)
    train.set_defaults(handler=cmd_train)

    evaluate = sub.add_parser("eval", parents=[common], help="Evaluar un checkpoint")
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--split", required=True)
    evaluate.add_argument("--metric", default="hits@100")
    evaluate.add_argument("--partition", choices=["valid", "test"], default="test")
    evaluate.add_argument("--features", default=None)
    evaluate.add_argument("--out", default=None, help="Archivo JSON (por defecto la salida estándar)")
    evaluate.set_defaults(handler=cmd_eval)

    recover = sub.add_parser("recover", parents=[common], help="Exportar la heurística generalizada")
    recover.add_argument("--checkpoint", required=True)
    source = recover.add_mutually_exclusive_group()
    source.add_argument("--split", default=None)
    source.add_argument("--graph", default=None)
    recover.add_argument("--dense", action="store_true", help="Incluir H densa (N <= 500)")
    recover.add_argument("--out", default=None)
    recover.set_defaults(handler=cmd_recover)

    gradcheck = sub.add_parser("gradcheck", parents=[common], help="Verificar gradientes")
    gradcheck.add_argument("--config", default=None)
    gradcheck.add_argument("--loss", choices=["auc", "bce", "both"], default="both")
    gradcheck.add_argument("--batch", type=int, default=8, help="Positivos del lote")
    gradcheck.add_argument("--step", type=float, default=1e-5)
    gradcheck.set_defaults(handler=cmd_gradcheck)

    synth = sub.add_parser("synth", parents=[common], help="Generar un dataset sintético")
    synth.add_argument("--kind", required=True, choices=["triangular", "hexagonal"])
    synth.add_argument("--size", type=int, default=None)
    synth.add_argument("--valid-ratio", type=float, default=0.05)
    synth.add_argument("--test-ratio", type=float, default=0.1)
    synth.add_argument("--out-dir", default=".")
    synth.set_defaults(handler=cmd_synth)

    split = sub.add_parser("split", parents=[common], help="Partir un grafo")
    split.add_argument("--graph", required=True)
    split.add_argument("--num-nodes", type=int, default=None)
    split.add_argument("--valid-ratio", type=float, default=0.05)
    split.add_argument("--test-ratio", type=float, default=0.1)
    split.add_argument("--out", required=True)
    split.set_defaults(handler=cmd_split)

    info = sub.add_parser("info", parents=[common], help="Resumen de un grafo")
    info.add_argument("--graph", required=True)
    info.add_argument("--num-nodes", type=int, default=None)
    info.set_defaults(handler=cmd_info)

    bench = sub.add_parser("bench", parents=[common], help="Benchmark de escalado de la propagación")
    bench.add_argument("--depths", type=_int_list, default=[5, 10, 20])
    bench.add_argument("--sizes", type=_int_list, default=[25000, 50000, 100000], help="Números de aristas")
    bench.add_argument("--features", type=_int_list, default=[16, 32, 64])
    bench.add_argument("--nodes", type=int, default=10000)
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--out", default=None)
    bench.set_defaults(handler=cmd_bench)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Interpreta los argumentos, fija los hilos y ejecuta el subcomando."""
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        raise ConfigError("--threads debe ser >= 1")
    set_num_threads(args.threads)
    return args.handler(args)
