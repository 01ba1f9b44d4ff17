"""
Command-line entry points: cluster, train, tag, eval, inspect.

Exit status is 0 on success, 1 for bad input or data, 2 for internal errors.
Every command writes its output files atomically.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
import tempfile

from .corpus import (DEFAULT_TYPES, CorpusError, LabelScheme, detect_columns, read_conll,
                     repair_bio, write_conll)
from .distrib import (DEFAULT_DEPTHS, DEFAULT_TF_CUTOFF, ClusterConfig, build_term_freq,
                      train_brown, write_paths, write_term_freq)
from .evaluate import render_kv, render_table, score
from .learner import (LEARNERS, LearnerConfig, ModelFormatError, format_top_features,
                      inspect_top_features, load_model, save_model, train)
from .pipeline import (collapse_types, config_for, config_from_meta, feature_meta,
                       load_resources, tag_sentences, training_instances)

logger = logging.getLogger("noisyner")


class UsageError(Exception):
    pass


USER_ERRORS = (UsageError, CorpusError, ModelFormatError, ValueError, OSError)


@contextlib.contextmanager
def atomic_write(path):
    """Open a temporary file next to `path`; rename over it only on success."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix="." + os.path.basename(path) + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _require(path, what):
    if not os.path.isfile(path):
        raise UsageError("{} not found: {}".format(what, path))


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _scheme(args):
    return LabelScheme(tuple(t.strip() for t in args.types.split(",") if t.strip()))


def read_token_corpus(path, conll=False):
    """Token sequences from whitespace-tokenized lines, or the first CoNLL column."""
    sents = []
    with open(path, encoding="utf-8") as f:
        if conll:
            cur = []
            for line in f:
                line = line.rstrip("\r\n")
                if line.strip():
                    cur.append(line.split("\t")[0])
                elif cur:
                    sents.append(cur)
                    cur = []
            if cur:
                sents.append(cur)
        else:
            sents = [line.split() for line in f if line.strip()]
    return sents


# ---------------------------------------------------------------- cluster

def cmd_cluster(args):
    _require(args.input, "input corpus")
    corpus = read_token_corpus(args.input, args.conll)
    if not corpus:
        raise UsageError("input corpus is empty: {}".format(args.input))
    config = ClusterConfig(num_classes=args.classes, min_count=args.min_count)
    model = train_brown(corpus, config)
    tf = build_term_freq(corpus, args.cutoff)
    tf_out = args.termfreq_out or args.out + ".termfreq"
    with atomic_write(args.out) as f:
        write_paths(model, f)
    with atomic_write(tf_out) as f:
        write_term_freq(tf, f)
    print("classes\t{}".format(len(model.classes())))
    print("vocabulary\t{}".format(len(model)))
    print("termfreq_entries\t{}".format(len(tf.relfreq)))
    return 0


# ---------------------------------------------------------------- train

def _train_spec(text):
    path, sep, epoch = text.rpartition(":")
    if not sep or not path or os.path.sep in epoch:
        return text, None
    return path, epoch


def _read_labeled(path, scheme, args, epoch=None):
    _require(path, "corpus")
    with open(path, encoding="utf-8") as f:
        return read_conll(f, scheme, has_labels=True, pos_column=args.pos_column,
                          unknown="O" if args.coerce_unknown else "error",
                          repair=args.repair_bio, epoch=epoch)


def cmd_train(args):
    if not args.train:
        raise UsageError("at least one --train file is required")
    scheme = _scheme(args)
    specs = [_train_spec(t) for t in args.train]
    epochs = [e for _, e in specs if e is not None]
    if len(set(epochs)) != len(epochs):
        raise UsageError("epoch tags must be unique per --train file")
    sentences = []
    for path, epoch in specs:
        sentences.extend(_read_labeled(path, scheme, args, epoch))
    if not sentences:
        raise UsageError("training data is empty")
    if args.notypes:
        scheme = LabelScheme(("entity",))
        sentences = collapse_types(sentences)

    for path, what in ((args.clusters, "cluster file"), (args.termfreq, "term-frequency file"),
                       (args.gazetteers, "gazetteer manifest")):
        if path:
            _require(path, what)
    resources = load_resources(args.clusters, args.termfreq, args.gazetteers)
    new_epochs = frozenset(e.strip() for e in (args.new_epochs or "").split(",") if e.strip())
    fconfig = config_for(resources, window=_ints(args.window), cluster_depths=_ints(args.depths),
                         use_pos=args.pos_column, old_epoch_weight=args.old_weight,
                         new_epochs=new_epochs)
    lconfig = LearnerConfig(l2_sigma2=args.l2_sigma2, lbfgs_memory=args.lbfgs_memory,
                            max_iterations=args.max_iterations, grad_tolerance=args.grad_tolerance,
                            pa_C=args.pa_c, epochs=args.epochs, seed=args.seed)
    instances = training_instances(sentences, resources, fconfig)
    model = train(instances, scheme, args.learner, lconfig)
    model.meta.update(feature_meta(fconfig, {"clusters": args.clusters, "termfreq": args.termfreq,
                                             "gazetteers": args.gazetteers}))
    model.meta["corpus.pos_column"] = str(int(args.pos_column))
    with atomic_write(args.model_out) as f:
        save_model(model, f)

    print("learner\t{}".format(model.learner_tag))
    print("sentences\t{}".format(len(sentences)))
    print("features\t{}".format(len(model.features)))
    h = model.history
    if "objective" in h:
        print("iterations\t{}".format(h["iterations"]))
        print("objective\t{:.6f}".format(h["objective"][-1]))
    if "mistakes" in h:
        print("mistakes\t{}".format(",".join(map(str, h["mistakes"]))))
    if "updates" in h:
        print("updates\t{}".format(",".join(map(str, h["updates"]))))
    return 0


# ---------------------------------------------------------------- tag

def cmd_tag(args):
    _require(args.model, "model file")
    _require(args.input, "input corpus")
    with open(args.model, encoding="utf-8") as f:
        model = load_model(f)
    meta = model.meta
    pos_column = meta.get("corpus.pos_column", "0") == "1" if args.pos_column is None \
        else args.pos_column
    paths = {}
    for name in ("clusters", "termfreq", "gazetteers"):
        override = getattr(args, name)
        paths[name] = override if override else meta.get("resource." + name) or None
        if paths[name]:
            _require(paths[name], name + " resource")
    resources = load_resources(paths["clusters"], paths["termfreq"], paths["gazetteers"])
    fconfig = config_from_meta(meta)

    with open(args.input, encoding="utf-8") as f:
        ncols = detect_columns(f)
        f.seek(0)
        expected = 1 + int(pos_column)
        if ncols not in (0, expected, expected + 1):
            raise UsageError("input has {} columns; expected {} (or {} with labels)".format(
                ncols, expected, expected + 1))
        has_labels = ncols == expected + 1
        sentences = read_conll(f, model.scheme, has_labels=has_labels, pos_column=pos_column,
                               validate=False)
    if has_labels:
        seen = {l for s in sentences for l in s.labels}
        if not seen <= set(model.labels):
            logger.warning("input labels %s are outside the model scheme; labels ignored",
                           sorted(seen - set(model.labels)))
    tagged = tag_sentences(model, sentences, resources, fconfig, args.constrain_bio)
    with atomic_write(args.out) as f:
        write_conll(tagged, f)
    return 0


# ---------------------------------------------------------------- eval

def _read_scored(path, args):
    _require(path, "corpus")
    with open(path, encoding="utf-8") as f:
        ncols = detect_columns(f)
        f.seek(0)
        if ncols not in (0, 2, 3):
            raise UsageError("{}: expected token[<TAB>pos]<TAB>label columns".format(path))
        sents = read_conll(f, has_labels=True, pos_column=ncols == 3, validate=False)
    if args.repair_bio:
        for s in sents:
            s.labels = repair_bio(s.labels)
    return sents


def cmd_eval(args):
    gold = _read_scored(args.gold, args)
    pred = _read_scored(args.pred, args)
    typed = score(gold, pred, "typed")
    notypes = score(gold, pred, "notypes") if args.notypes else None
    if args.kv:
        sys.stdout.write(render_kv(typed))
        if notypes:
            sys.stdout.write(render_kv(notypes))
    else:
        sys.stdout.write(render_table(typed, notypes))
    return 0


# ---------------------------------------------------------------- inspect

def cmd_inspect(args):
    _require(args.model, "model file")
    with open(args.model, encoding="utf-8") as f:
        model = load_model(f)
    if args.top < 0:
        raise UsageError("--top must be non-negative")
    rows = inspect_top_features(model, args.top, args.filter)
    sys.stdout.write(format_top_features(rows))
    return 0


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    """Usage mistakes are user errors: exit status 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "{}: error: {}\n".format(self.prog, message))


def build_parser():
    p = _Parser(prog="noisyner", description=__doc__.strip().splitlines()[0])
    p.add_argument("--config", help="flat key=value file of flag defaults (flags win)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cluster", help="build Brown clusters and term frequencies")
    c.add_argument("--input", required=True, help="corpus: one whitespace-tokenized sentence per line")
    c.add_argument("--conll", action="store_true", help="read the token column of a CoNLL file instead")
    c.add_argument("--classes", type=int, default=2000, help="number of classes (default: %(default)s)")
    c.add_argument("--min-count", type=int, default=1, help="vocabulary frequency floor (default: %(default)s)")
    c.add_argument("--out", required=True, help="paths file to write")
    c.add_argument("--termfreq-out", help="term-frequency file (default: OUT.termfreq)")
    c.add_argument("--cutoff", type=int, default=DEFAULT_TF_CUTOFF,
                   help="keep the top N words for term frequency (default: %(default)s)")
    c.set_defaults(func=cmd_cluster)

    t = sub.add_parser("train", help="train a sequence labeler")
    t.add_argument("--train", action="append", metavar="PATH[:EPOCH]",
                   help="labeled CoNLL file, optionally tagged with its dataset epoch (repeatable)")
    t.add_argument("--learner", choices=LEARNERS, default="crf-lbfgs", help="(default: %(default)s)")
    t.add_argument("--clusters", help="Brown paths file")
    t.add_argument("--termfreq", help="term-frequency file")
    t.add_argument("--gazetteers", help="gazetteer manifest")
    t.add_argument("--old-weight", type=float, default=0.7,
                   help="feature scale for epochs not in --new-epochs (default: %(default)s)")
    t.add_argument("--new-epochs", default="", help="comma-separated epochs left unscaled")
    t.add_argument("--model-out", required=True, help="model file to write")
    t.add_argument("--types", default=",".join(DEFAULT_TYPES), help="comma-separated entity types")
    t.add_argument("--pos-column", action="store_true", help="corpora carry a POS column")
    t.add_argument("--coerce-unknown", action="store_true", help="map unknown labels to O")
    t.add_argument("--repair-bio", action="store_true", help="repair orphaned I- labels")
    t.add_argument("--notypes", action="store_true", help="collapse all entity types before training")
    t.add_argument("--window", default="-2,2", help="context window (default: %(default)s)")
    t.add_argument("--depths", default=",".join(map(str, DEFAULT_DEPTHS)),
                   help="cluster prefix depths (default: %(default)s)")
    t.add_argument("--l2-sigma2", type=float, default=10.0, help="L2 prior variance (default: %(default)s)")
    t.add_argument("--lbfgs-memory", type=int, default=10, help="(default: %(default)s)")
    t.add_argument("--max-iterations", type=int, default=200, help="(default: %(default)s)")
    t.add_argument("--grad-tolerance", type=float, default=1e-5, help="(default: %(default)s)")
    t.add_argument("--pa-c", type=float, default=1.0, help="PA aggressiveness cap (default: %(default)s)")
    t.add_argument("--epochs", type=int, default=10, help="online learner passes (default: %(default)s)")
    t.add_argument("--seed", type=int, default=0, help="shuffling seed (default: %(default)s)")
    t.set_defaults(func=cmd_train)

    g = sub.add_parser("tag", help="label a CoNLL file with a trained model")
    g.add_argument("--model", required=True)
    g.add_argument("--input", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--constrain-bio", action="store_true", help="decode under hard BIO constraints")
    g.add_argument("--pos-column", dest="pos_column", action="store_true", default=None,
                   help="input carries a POS column (default: as in training)")
    g.add_argument("--no-pos-column", dest="pos_column", action="store_false")
    g.add_argument("--clusters", help="override the cluster file recorded in the model")
    g.add_argument("--termfreq", help="override the term-frequency file recorded in the model")
    g.add_argument("--gazetteers", help="override the gazetteer manifest recorded in the model")
    g.set_defaults(func=cmd_tag)

    e = sub.add_parser("eval", help="score predicted entities against gold")
    e.add_argument("--gold", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--notypes", action="store_true", help="add a No types row (all types collapsed)")
    e.add_argument("--kv", action="store_true", help="print key=value metrics instead of a table")
    e.add_argument("--repair-bio", action="store_true", help="repair orphaned I- labels before scoring")
    e.set_defaults(func=cmd_eval)

    i = sub.add_parser("inspect", help="list the largest-weighted features of a model")
    i.add_argument("--model", required=True)
    i.add_argument("--top", type=int, default=20, help="(default: %(default)s)")
    i.add_argument("--filter", action="append", help="observation-name prefix (repeatable)")
    i.set_defaults(func=cmd_inspect)
    return p


def read_config_file(path):
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError("{}:{}: expected key=value".format(path, lineno))
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(parser, cfg):
    """
    Install config-file values as subcommand defaults. Flags given on the
    command line still win; required flags may come from the file.
    """
    appends = {}
    used = set()
    for name, subparser in parser._subparsers._group_actions[0].choices.items():
        defaults = {}
        for action in subparser._actions:
            if action.dest not in cfg or action.dest == "help":
                continue
            used.add(action.dest)
            raw = cfg[action.dest]
            action.required = False
            if action.nargs == 0:
                defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            elif isinstance(action, argparse._AppendAction):
                # a non-empty default list would be extended by the flags, not replaced
                defaults[action.dest] = None
                appends[action.dest] = [v for v in raw.split(",") if v]
            else:
                defaults[action.dest] = action.type(raw) if action.type else raw
        subparser.set_defaults(**defaults)
    for key in sorted(set(cfg) - used - {"config", "verbose"}):
        logger.warning("config key %r matches no flag; ignored", key)
    return appends


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    pre.add_argument("-v", "--verbose", action="store_true")
    known, _ = pre.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if known.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    appends = {}
    if known.config:
        try:
            appends = _apply_config(parser, read_config_file(known.config))
        except (UsageError, OSError, ValueError) as e:
            print("noisyner: error: config file {}: {}".format(known.config, e), file=sys.stderr)
            return 1
    args = parser.parse_args(argv)
    for dest, values in appends.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, values)
    try:
        return args.func(args)
    except USER_ERRORS as e:
        print("noisyner {}: error: {}".format(args.command, e), file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        logger.exception("internal error")
        print("noisyner {}: internal error: {}".format(args.command, e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
