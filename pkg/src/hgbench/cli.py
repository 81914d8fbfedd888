"""Command-line front end.

Every subcommand reads its inputs from ``--in DIR`` (default: the ``--out``
directory) under the file names ``synth`` writes, unless a path flag
overrides one, so a whole run can be chained through a single directory::

    hgbench synth --seed 7 --out run
    hgbench attribute --out run
    hgbench compute --out run --window 2001:2005 --obs-date 2008-03-31
    hgbench benchmark --out run --index h

Exit status: 0 success, 1 data error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import asdict
from datetime import date

from hgbench import _backend
from hgbench.benchstats import (LowCountRow, RangeRow, SummaryRow, benchmark, percentile_of,
                                render_table)
from hgbench.corpus import (CorpusError, WindowConfig, effective_sds, eligible_researchers,
                            parse_publications, parse_roster, parse_scheme, unknown_categories,
                            uses_snapshot)
from hgbench.disambig import (DisambigConfig, attribute, evaluate, format_attributions,
                              format_residue, parse_aliases, parse_attributions, parse_gold)
from hgbench.indices import (INDEX_NAMES, OK, ProfileRow, compute_profiles, format_profiles,
                             paper_stats, parse_baselines, parse_profiles)
from hgbench.synthgen import SynthConfig, SynthError, corpus_census, generate

log = logging.getLogger("hgbench")

DEFAULT_FILES = {
    "publications": "publications.jsonl",
    "roster": "roster.csv",
    "scheme": "scheme.csv",
    "affinity": "affinity.csv",
    "aliases": "aliases.csv",
    "gold": "gold.csv",
    "baselines": "baselines.csv",
    "attributions": "attributions.csv",
    "profiles": "profiles.csv",
}


class DataError(Exception):
    pass


class UsageError(Exception):
    pass


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- argument types ----------------------------------------------------------

def _window_arg(text: str) -> tuple[int, int]:
    try:
        start, end = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END years, got {text!r}") from None
    if start > end:
        raise argparse.ArgumentTypeError(f"start {start} is after end {end}")
    return start, end


def _date_arg(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid ISO date {text!r}") from None


def _indices_arg(text: str) -> tuple[str, ...]:
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [x for x in names if x not in INDEX_NAMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"indices must be drawn from {','.join(INDEX_NAMES)}, got {text!r}")
    return names


def _weights_arg(text: str) -> tuple[float, float, float]:
    try:
        w = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must be numbers, got {text!r}") from None
    if len(w) != 3 or any(x < 0 for x in w) or abs(sum(w) - 1) > 1e-9:
        raise argparse.ArgumentTypeError("weights must be three nonnegative numbers summing to 1")
    return w  # type: ignore[return-value]


def _unit_arg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


# -- helpers -----------------------------------------------------------------

def _path(args, key: str) -> str:
    given = getattr(args, key, None)
    if given:
        return given
    name = DEFAULT_FILES[key]
    if args.in_dir:
        # stage outputs land in --out, so fall back there when --in lacks the file
        path = os.path.join(args.in_dir, name)
        out_path = os.path.join(args.out, name)
        if not os.path.exists(path) and os.path.exists(out_path):
            return out_path
        return path
    return os.path.join(args.out, name)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _load(args, key: str, parser):
    path = _path(args, key)
    try:
        return parser(_read(path))
    except CorpusError as exc:
        raise DataError(f"{path}: {exc}") from None


def _optional(args, key: str) -> str | None:
    path = _path(args, key)
    if getattr(args, key, None) or os.path.exists(path):
        return _read(path)
    return None


def _scheme(args):
    affinity = _optional(args, "affinity")
    try:
        return parse_scheme(_read(_path(args, "scheme")), affinity)
    except CorpusError as exc:
        raise DataError(f"classification: {exc}") from None


def _ext(fmt: str) -> str:
    return ".md" if fmt == "markdown" else ".csv"


# -- commands ----------------------------------------------------------------

def cmd_synth(args) -> int:
    w = WindowConfig(args.window[0], args.window[1], args.obs_date)
    try:
        out = generate(SynthConfig(seed=args.seed, n_researchers=args.researchers,
                                   homonym_rate=args.homonym_rate, window=w))
    except SynthError as exc:
        raise DataError(str(exc)) from None
    out.write(args.out, writer=write_atomic)
    print(f"wrote synthetic corpus to {args.out}")
    return 0


def cmd_ingest(args) -> int:
    pubs = _load(args, "publications", parse_publications)
    roster = _load(args, "roster", parse_roster)
    scheme = _scheme(args)
    census = corpus_census(pubs, roster)
    w = WindowConfig(args.window[0], args.window[1], args.obs_date)
    bad_sds = sorted({c for e in roster for _, c in e.sds_history if not scheme.has_sds(c)})
    report = {
        "census": asdict(census),
        "eligible_researchers": len(eligible_researchers(roster, w)),
        "in_window_publications": sum(1 for p in pubs if w.start_year <= p.year <= w.end_year),
        "snapshot_only_publications": sum(1 for p in pubs if uses_snapshot(p)),
        "unknown_category_publications": len(unknown_categories(pubs, scheme))
        if scheme.category_affinity is not None else None,
        "unknown_sds_codes": bad_sds,
    }
    write_atomic(os.path.join(args.out, "ingest_report.json"), _json(report))
    print(f"{census.publications} publications, {census.researchers} researchers, "
          f"{census.mentions} mentions, homonym fraction {census.homonym_fraction:.4f}")
    return 0


def cmd_attribute(args) -> int:
    pubs = _load(args, "publications", parse_publications)
    roster = _load(args, "roster", parse_roster)
    scheme = _scheme(args)
    aliases_text = _optional(args, "aliases")
    try:
        aliases = parse_aliases(aliases_text) if aliases_text is not None else {}
    except CorpusError as exc:
        raise DataError(f"aliases: {exc}") from None
    config = DisambigConfig(args.threshold, args.weights, aliases)
    w = WindowConfig(args.window[0], args.window[1], args.obs_date)
    result = attribute(pubs, roster, scheme, config, window=w)
    write_atomic(os.path.join(args.out, "attributions.csv"), format_attributions(result.attributions))
    write_atomic(os.path.join(args.out, "residue.csv"), format_residue(result.residue))
    msg = f"{len(result.attributions)} attributed, {len(result.residue)} unattributed mentions"
    gold_text = _optional(args, "gold")
    if gold_text is not None:
        try:
            gold = parse_gold(gold_text)
        except CorpusError as exc:
            raise DataError(f"gold: {exc}") from None
        rep = evaluate(result.attributions, gold)
        write_atomic(os.path.join(args.out, "evaluation.json"), _json(asdict(rep)))
        msg += f"; precision {rep.precision:.4f} recall {rep.recall:.4f} F {rep.f_measure:.4f}"
    print(msg)
    return 0


def cmd_compute(args) -> int:
    have_baselines = bool(args.baselines) or os.path.exists(_path(args, "baselines"))
    if args.indices is None:
        # default: everything computable with the inputs at hand
        args.indices = tuple(i for i in INDEX_NAMES if i != "hf" or have_baselines)
    elif "hf" in args.indices and not have_baselines:
        raise UsageError("--indices hf needs --baselines")
    pubs = _load(args, "publications", parse_publications)
    roster = _load(args, "roster", parse_roster)
    scheme = _scheme(args)
    atts = _load(args, "attributions", parse_attributions)
    baselines = None
    if "hf" in args.indices:
        baselines = _load(args, "baselines", parse_baselines)
    w = WindowConfig(args.window[0], args.window[1], args.obs_date)

    eligible = eligible_researchers(roster, w)
    assigned: dict[str, tuple[str, str]] = {}
    unassigned = []
    for e in eligible:
        try:
            sds = effective_sds(e, w)
            assigned[e.researcher_id] = (sds, scheme.uda_of(sds))
        except CorpusError as exc:
            unassigned.append(e.researcher_id)
            log.warning("skipping %s", exc)
    by_id = {p.pub_id: p for p in pubs}
    try:
        papers = paper_stats(atts, by_id, w)
    except CorpusError as exc:
        raise DataError(str(exc)) from None
    sets = compute_profiles(assigned, papers, baselines, pad_g=not args.g_cap)
    rows = [ProfileRow(rid, *assigned[rid], sets[rid]) for rid in sorted(assigned)]
    write_atomic(os.path.join(args.out, "profiles.csv"), format_profiles(rows, args.indices))
    meta = {
        "backend": _backend.BACKEND,
        "window": f"{w.start_year}:{w.end_year}",
        "observation_date": w.observation_date.isoformat(),
        "g_padding": not args.g_cap,
        "eligible": len(eligible),
        "profiled": len(rows),
        "unassigned_sds": unassigned,
        "snapshot_only_publications": sum(1 for p in pubs if uses_snapshot(p)),
        "hf_failures": {rid: s.hf_error for rid, s in sets.items() if s.hf_error},
    }
    write_atomic(os.path.join(args.out, "compute_meta.json"), _json(meta))
    print(f"{len(rows)} profiles ({_backend.BACKEND} kernels)")
    return 0


def cmd_benchmark(args) -> int:
    rows = _load(args, "profiles", parse_profiles)
    try:
        bench = benchmark(rows, args.index)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    ext = _ext(args.format)
    tag = args.index
    table = render_table(bench.uda_rows + bench.sds_rows, args.format, SummaryRow, with_level=True)
    write_atomic(os.path.join(args.out, f"benchmark_{tag}{ext}"), table)
    write_atomic(os.path.join(args.out, f"ranges_{tag}{ext}"),
                 render_table(bench.ranges, args.format, RangeRow))
    write_atomic(os.path.join(args.out, f"lowcounts_{tag}{ext}"),
                 render_table(bench.lows, args.format, LowCountRow))
    write_atomic(os.path.join(args.out, f"benchmark_{tag}.json"), _json(bench.meta()))
    ex = bench.exclusion
    print(f"{bench.n_eligible} researchers in {len(bench.sds_rows)} SDSs; excluded "
          f"{ex.excluded_total} ({ex.zero_publications} without publications, "
          f"{ex.zero_citations} uncited)")
    return 0


def cmd_compare(args) -> int:
    rows = _load(args, "profiles", parse_profiles)
    me = next((r for r in rows if r.researcher_id == args.researcher), None)
    if me is None:
        raise DataError(f"researcher {args.researcher!r} not in profiles")
    value = me.indexes.value(args.index)
    if value is None:
        raise DataError(f"index {args.index} was not computed for {args.researcher}")

    def peers(pred):
        return [r.indexes.value(args.index) for r in rows
                if pred(r) and r.indexes.status == OK and r.indexes.value(args.index) is not None]

    header = ["researcher_id", "sds", "uda", "index", "value", "group", "group_n", "percentile"]
    body = []
    for level, pred, code in (("SDS", lambda r: r.sds == me.sds, me.sds),
                              ("UDA", lambda r: r.uda == me.uda, me.uda)):
        group = peers(pred)
        pct = percentile_of(value, group) if group else None
        body.append([me.researcher_id, me.sds, me.uda, args.index, _num(value),
                     f"{level}:{code}", str(len(group)), "" if pct is None else f"{pct:.2f}"])
    if args.format == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
        lines += ["| " + " | ".join(b) + " |" for b in body]
        text = "\n".join(lines) + "\n"
    else:
        text = ",".join(header) + "\n" + "".join(",".join(b) + "\n" for b in body)
    write_atomic(os.path.join(args.out, f"compare_{args.researcher}_{args.index}{_ext(args.format)}"),
                 text)
    sys.stdout.write(text)
    return 0


def _num(v) -> str:
    return str(v) if isinstance(v, int) else f"{v:.2f}"


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--in", dest="in_dir", default=None,
                        help="input directory; files missing there are looked up in --out")
    common.add_argument("--format", choices=("csv", "markdown"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--window", type=_window_arg, default=(2001, 2005), metavar="START:END")
    window.add_argument("--obs-date", type=_date_arg, default=date(2008, 3, 31), metavar="YYYY-MM-DD")

    def inputs(p, *keys):
        for key in keys:
            p.add_argument(f"--{key}", default=None, metavar="PATH")

    parser = argparse.ArgumentParser(prog="hgbench", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common, window], help="generate a synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--researchers", type=int, default=2000)
    p.add_argument("--homonym-rate", type=float, default=0.12)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", parents=[common, window], help="validate and census the inputs")
    inputs(p, "publications", "roster", "scheme", "affinity")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("attribute", parents=[common, window], help="attribute mentions to researchers")
    inputs(p, "publications", "roster", "scheme", "affinity", "aliases", "gold")
    p.add_argument("--threshold", type=_unit_arg, default=DisambigConfig.threshold)
    p.add_argument("--weights", type=_weights_arg, default=DisambigConfig.weights,
                   metavar="AFF,FIELD,UNIQ")
    p.set_defaults(func=cmd_attribute)

    p = sub.add_parser("compute", parents=[common, window], help="per-researcher indexes")
    inputs(p, "publications", "roster", "scheme", "affinity", "attributions", "baselines")
    p.add_argument("--indices", type=_indices_arg, default=None, metavar="h,g,hi,hm,hf",
                   help="default: all, hf only when baselines are available")
    p.add_argument("--g-cap", action="store_true",
                   help="cap g at the number of papers instead of padding with zeros")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("benchmark", parents=[common], help="per-field benchmark tables")
    inputs(p, "profiles")
    p.add_argument("--index", choices=INDEX_NAMES, default="h")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("compare", parents=[common], help="a researcher against their field")
    inputs(p, "profiles")
    p.add_argument("--researcher", required=True, metavar="ID")
    p.add_argument("--index", choices=INDEX_NAMES, default="h")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (DataError, CorpusError, ValueError) as exc:
        print(f"hgbench {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
