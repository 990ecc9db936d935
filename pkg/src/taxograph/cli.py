"""Command line entry point: extract, build-graph, query, eval."""

import argparse
import json
import logging
import os
import sys

from . import evaluation as ev
from .builder import build_taxonomy
from .config import ConfigError, load_config
from .corpus import CorpusError, CorpusReader
from .extraction import (default_prepositions, default_stopwords, extract_topics, load_wordlist,
                         read_counts, read_topics, write_counts, write_topics)
from .graph import GraphConfigMismatch, GraphFormatError, build_graph, read_graph, write_graph
from .query import QueryError, query_subgraph
from .taxonomy import TaxonomyError, read_taxonomy, to_dot, to_json, write_taxonomy

log = logging.getLogger("taxograph")

TOPICS_FILE = "topics.tsv"
COUNTS_FILE = "cooccurrence.tsv"

# flag -> config key
OVERRIDES = {
    "lambda1": "lambda1", "lambda2": "lambda2", "rmax": "r_max", "kmin": "k_min",
    "smin": "s_min", "alpha": "alpha", "beta": "beta", "seed": "seed",
}


class CliError(Exception):
    pass


def _config(args):
    cfg = load_config(args.config)
    changes = {OVERRIDES[k]: getattr(args, k) for k in OVERRIDES}
    cfg = cfg.override(**changes)
    if args.dump_config:
        with open(args.dump_config, "w", encoding="utf-8") as fh:
            fh.write(cfg.to_json())
    return cfg


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_extract(args):
    cfg = _config(args)
    docs = CorpusReader(args.corpus)
    stop = load_wordlist(cfg.stopwords) if cfg.stopwords else default_stopwords()
    preps = load_wordlist(cfg.prepositions) if cfg.prepositions else default_prepositions()
    topics, counts = extract_topics(docs, stop, preps, cfg.min_count)
    os.makedirs(args.out, exist_ok=True)
    write_topics(os.path.join(args.out, TOPICS_FILE), topics)
    write_counts(os.path.join(args.out, COUNTS_FILE), counts)
    if docs.skipped:
        log.warning("skipped %d malformed or duplicate corpus records", docs.skipped)
    print(json.dumps({"documents": docs.count, "skipped": docs.skipped,
                      "topics": len(topics), "pairs": len(counts)}, sort_keys=True))
    return 0


def _topic_files(args):
    if args.counts is None:
        return os.path.join(args.topics, TOPICS_FILE), os.path.join(args.topics, COUNTS_FILE)
    return args.topics, args.counts


def cmd_build_graph(args):
    cfg = _config(args)
    tpath, cpath = _topic_files(args)
    topics = read_topics(tpath)
    counts = read_counts(cpath, topics)
    graph = build_graph(topics, counts, cfg.graph())
    write_graph(args.out, graph)
    print(json.dumps({"vertices": graph.n, "edges": graph.n_edges,
                      "lambda1": cfg.lambda1, "lambda2": cfg.lambda2}, sort_keys=True))
    return 0


def cmd_query(args):
    cfg = _config(args)
    if not args.query:
        raise CliError("query needs --query")
    graph = read_graph(args.graph, expect=cfg.graph())
    sub = query_subgraph(graph, args.query, cfg.query())
    tax = build_taxonomy(sub, cfg.partition())
    summary = {
        "query": sub.query,
        "expansion": list(tax.meta["expansion"]),
        "vertices": len(sub),
        "nodes": len(tax),
        "depth": tax.depth(),
        "splits": tax.meta["splits"],
        "balance_violations": tax.meta["balance_violations"],
        "eigen_fallbacks": tax.meta["eigen_fallbacks"],
    }
    if args.out:
        write_taxonomy(args.out, tax)
        summary["output"] = args.out
    else:
        summary["taxonomy"] = json.loads(to_json(tax))
    if args.dot:
        _write_text(args.dot, to_dot(tax))
    print(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False))
    return 0


def _load_gold(path, tax, topics_path):
    # a JSON tree is taken as is; anything else is a category edge file
    with open(path, encoding="utf-8") as fh:
        head = fh.read(1)
    if head == "{":
        return read_taxonomy(path)
    candidates = read_topics(topics_path).topics if topics_path else tax.topics()
    return ev.build_gold_standard(ev.read_category_edges(path), tax.root, candidates)


def _emit(args, text):
    if args.report:
        _write_text(args.report, text)
    sys.stdout.write(text)


def cmd_eval(args):
    _config(args)
    tax = read_taxonomy(args.taxonomy)
    if args.mode == "gold":
        if not args.gold:
            raise CliError("--mode gold needs --gold")
        gold = _load_gold(args.gold, tax, args.topics)
        _emit(args, ev.match_report(tax, gold).to_text())
    elif args.mode == "judgments":
        if not args.judgments:
            raise CliError("--mode judgments needs --judgments")
        rep = ev.judgment_report(ev.read_judgments(args.judgments), tax)
        _emit(args, "".join(f"{k}\t{v!r}\n" for k, v in rep.items()))
    else:
        if not (args.corpus and args.topics):
            raise CliError("--mode hac-baseline needs --corpus and --topics")
        topics = read_topics(args.topics)
        names = sorted(t for t in tax.topics() if t != tax.root)
        missing = [t for t in names if t not in topics]
        if missing:
            raise CliError(f"taxonomy topics absent from {args.topics}: {missing[:5]}")
        vectors = ev.incidence_vectors(CorpusReader(args.corpus), topics, names)
        strengths = None
        if args.graph:
            graph = read_graph(args.graph)
            strengths = [graph.strength[graph.topics.id_of(t)] for t in names]
        res = ev.hac_baseline(names, vectors, tax.root, strengths)
        if args.out:
            write_taxonomy(args.out, res.taxonomy)
        if args.dot:
            _write_text(args.dot, to_dot(res.taxonomy))
        lines = [f"topics\t{len(names)}", f"merges\t{len(res.merges)}",
                 f"degenerate_pairs\t{res.degenerate}", "label_rule\tstrength"]
        for a, b, d, c, label in res.merges:
            lines.append(f"merge\t{a}\t{b}\t{d!r}\t{c}\t{label}")
        if args.gold:
            gold = _load_gold(args.gold, tax, args.topics)
            rep = ev.match_report(res.taxonomy, gold)
            lines += [f"gold_exact\t{rep.exact!r}", f"gold_partial\t{rep.partial!r}"]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--dump-config", metavar="PATH", help="write the effective config here")
    common.add_argument("--lambda1", type=float)
    common.add_argument("--lambda2", type=float)
    common.add_argument("--rmax", type=int)
    common.add_argument("--kmin", type=int)
    common.add_argument("--smin", type=int)
    common.add_argument("--alpha", type=int)
    common.add_argument("--beta", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="taxograph", description="Topic taxonomies from a publication corpus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="ngram topics and co-occurrence counts")
    p.add_argument("corpus", help="JSON-lines corpus")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("build-graph", parents=[common], help="weighted topic graph")
    p.add_argument("topics", help="extract output directory, or a topics file")
    p.add_argument("counts", nargs="?", help="co-occurrence file when TOPICS is a file")
    p.add_argument("-o", "--out", required=True, help="graph file")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("query", parents=[common], help="taxonomy for one query topic")
    p.add_argument("graph")
    p.add_argument("--query", help="topic string or single word")
    p.add_argument("-o", "--out", help="taxonomy JSON (inlined in the summary if omitted)")
    p.add_argument("--dot", help="also write Graphviz DOT here")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", parents=[common], help="score a taxonomy")
    p.add_argument("taxonomy")
    p.add_argument("--mode", choices=("gold", "judgments", "hac-baseline"), default="gold")
    p.add_argument("--gold", help="gold taxonomy JSON or category edge file")
    p.add_argument("--judgments")
    p.add_argument("--topics", help="topics file (gold candidates / HAC vectors)")
    p.add_argument("--corpus", help="corpus for HAC document vectors")
    p.add_argument("--graph", help="graph file for HAC label strengths")
    p.add_argument("-o", "--out", help="HAC taxonomy JSON")
    p.add_argument("--dot", help="HAC taxonomy DOT")
    p.add_argument("--report", help="also write the report here")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ConfigError, CorpusError, QueryError, GraphFormatError, GraphConfigMismatch,
            TaxonomyError, ev.EvaluationError, OSError, ValueError) as exc:
        print(f"taxograph {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
