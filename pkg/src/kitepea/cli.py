"""Command-line entry point: ``kitepea check | classify | refine``.

A run is described by a JSON document::

    {"group": {"kind": "integers"}, "index_size": 2,
     "lambda": [0, 1], "rho": [1, 0], "n": 1, "bound": 2,
     "suites": ["pea_axioms", "iso"]}

Permutations are image arrays: ``[1, 2, 0]`` sends 0 to 1, 1 to 2 and
2 to 0, i.e. the cycle ``(0 1 2)``. Give either ``lambda`` and ``rho``
(a kite and its lexicographic model) or ``phi`` (the model alone).

Exit status is 0 when nothing failed, 1 when some check failed and 2 for
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, KitepeaError, Unavailable, UsageError
from .kite import KiteAlgebra
from .lexext import NPerfectAlgebra, canonical_state, check_slices
from .pea import (
    CheckReport,
    Status,
    check_mv_axioms,
    check_normal_ideal,
    check_pea_axioms,
    check_state,
    check_symmetric,
    timed,
)
from .permutation import Permutation
from .pogroup import Kind, PoGroup, RdpClass
from .rdp import LexAmbient, classify_rdp, lex_refine_rdp1, brute_refine, render_table, rip_sweep, verify_table
from .structure import Decision, build_phi, check_iso, decide_subdirect_irreducibility, decompose

SUITES = (
    "pea_axioms",
    "slices",
    "rdp_classify",
    "rdp1_refine",
    "rip",
    "iso",
    "mv",
    "state",
    "symmetric",
    "normal_ideal",
    "irreducibility",
    "decompose",
)
DEFAULT_CAP = 10**6
_KEYS = {"group", "index_size", "lambda", "rho", "phi", "n", "bound", "samples", "seed", "suites", "window_cap"}
_GROUP_KEYS = {"kind", "dim"}


# ----------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    group: PoGroup
    m: int
    lam: Optional[Permutation]
    rho: Optional[Permutation]
    phi: Permutation
    n: int = 1
    bound: int = 2
    samples: int = 200
    seed: int = 0
    suites: list = field(default_factory=list)
    window_cap: int = DEFAULT_CAP

    def canonical(self):
        """The normalized configuration as plain JSON data."""
        g = {"kind": self.group.kind.value}
        if self.group.kind is Kind.INT_VECTORS:
            g["dim"] = self.group.dim
        out = {"group": g, "index_size": self.m}
        if self.lam is not None:
            out["lambda"] = list(self.lam)
            out["rho"] = list(self.rho)
        else:
            out["phi"] = list(self.phi)
        out.update(
            n=self.n,
            bound=self.bound,
            samples=self.samples,
            seed=self.seed,
            suites=list(self.suites),
            window_cap=self.window_cap,
        )
        return out

    def digest(self):
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _int(doc, key, lo, default=None, path=None):
    path = path or key
    if key not in doc:
        if default is None:
            raise ConfigError(path, "missing")
        return default
    v = doc[key]
    if type(v) is not int:
        raise ConfigError(path, f"expected an integer, got {json.dumps(v)}")
    if v < lo:
        raise ConfigError(path, f"must be at least {lo}, got {v}")
    return v


def _perm(doc, key, m):
    v = doc[key]
    if not isinstance(v, list) or not all(type(x) is int for x in v):
        raise ConfigError(key, "expected an array of integers")
    if len(v) != m:
        raise ConfigError(key, f"has length {len(v)}, expected index_size = {m}")
    try:
        return Permutation(tuple(v))
    except UsageError:
        raise ConfigError(key, f"not a bijection at {key}: {v}") from None


def _group(doc):
    if not isinstance(doc, dict):
        raise ConfigError("group", "expected an object")
    extra = sorted(set(doc) - _GROUP_KEYS)
    if extra:
        raise ConfigError(f"group.{extra[0]}", "unknown key")
    kinds = [k.value for k in Kind]
    kind = doc.get("kind")
    if kind not in kinds:
        raise ConfigError("group.kind", f"expected one of {', '.join(kinds)}, got {json.dumps(kind)}")
    if kind == Kind.INT_VECTORS.value:
        return PoGroup(Kind.INT_VECTORS, _int(doc, "dim", 1, path="group.dim"))
    if "dim" in doc:
        raise ConfigError("group.dim", f"only meaningful for {Kind.INT_VECTORS.value}")
    return PoGroup(Kind(kind))


def parse_config(source) -> RunConfig:
    """Validate a configuration given as a JSON string, a path or a dict."""
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            try:
                with open(text, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError("", f"cannot read {source}: {exc.strerror}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("", "expected a JSON object")
    extra = sorted(set(doc) - _KEYS)
    if extra:
        raise ConfigError(extra[0], "unknown key")
    if "group" not in doc:
        raise ConfigError("group", "missing")
    G = _group(doc["group"])

    m = doc.get("index_size")
    if isinstance(m, float) and math.isinf(m) or isinstance(m, str):
        raise ConfigError(
            "index_size", "must be finite: index sets are countable, and only finite ones can be represented"
        )
    m = _int(doc, "index_size", 0)

    has_kite = "lambda" in doc or "rho" in doc
    if has_kite == ("phi" in doc):
        raise ConfigError("phi", "give exactly one of (lambda and rho) or phi")
    if has_kite:
        for k in ("lambda", "rho"):
            if k not in doc:
                raise ConfigError(k, "missing; lambda and rho come together")
        lam, rho = _perm(doc, "lambda", m), _perm(doc, "rho", m)
        phi = build_phi(lam, rho)
    else:
        lam = rho = None
        phi = _perm(doc, "phi", m)

    suites = doc.get("suites", [])
    if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
        raise ConfigError("suites", "expected an array of suite names")
    for k, s in enumerate(suites):
        if s not in SUITES:
            raise ConfigError(f"suites[{k}]", f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    if len(set(suites)) != len(suites):
        raise ConfigError("suites", "duplicate suite")

    cfg = RunConfig(
        group=G,
        m=m,
        lam=lam,
        rho=rho,
        phi=phi,
        n=_int(doc, "n", 1, 1),
        bound=_int(doc, "bound", 1, 2),
        samples=_int(doc, "samples", 1, 200),
        seed=_int(doc, "seed", 0, 0),
        suites=suites,
        window_cap=_int(doc, "window_cap", 1, DEFAULT_CAP),
    )
    check_size(cfg)
    return cfg


def window_estimate(cfg):
    """Elements in the largest window the run enumerates, or 0 when it samples."""
    G = cfg.group
    if not G.enumerable_intervals:
        return 0
    half = G.half_ball_size(cfg.bound) ** cfg.m
    full = G.ball_size(cfg.bound) ** cfg.m
    return max(2 * half, 2 * half + (cfg.n - 1) * full)


def check_size(cfg):
    est = window_estimate(cfg)
    if est > cfg.window_cap:
        raise ConfigError("bound", f"window of about {est} elements exceeds the cap of {cfg.window_cap}")


# ----------------------------------------------------------------------
# suites


class Run:
    """The universes built from one configuration."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.lex = NPerfectAlgebra.build(cfg.group, cfg.m, cfg.phi, cfg.n)
        self.kite = KiteAlgebra(cfg.group, cfg.m, cfg.lam, cfg.rho) if cfg.lam is not None else None

    @property
    def enumerable(self):
        return self.cfg.group.enumerable_intervals

    def universes(self):
        out = []
        if self.kite is not None:
            out.append(("kite", self.kite))
        out.append(("lex", self.lex))
        return out

    def opts(self):
        c = self.cfg
        return {"samples": None if self.enumerable else c.samples, "seed": c.seed}


def _merge(name, parts):
    """One report from per-universe reports, prefixing check names when there are several."""
    out = CheckReport(name)
    for prefix, rep in parts:
        for c in rep.checks:
            if len(parts) > 1:
                c.name = f"{prefix}: {c.name}"
            out.checks.append(c)
        out.elapsed_ms += rep.elapsed_ms
    return out


def _skipped(name, reason):
    rep = CheckReport(name)
    rep.skip(name, reason)
    return rep


def suite_pea_axioms(run):
    return _merge(
        "pea_axioms",
        [(p, check_pea_axioms(U, run.cfg.bound, **run.opts())) for p, U in run.universes()],
    )


def suite_slices(run):
    return check_slices(run.lex, run.cfg.bound, **run.opts())


def suite_rdp_classify(run):
    if not run.enumerable:
        return _skipped("rdp_classify", f"{run.cfg.group} is not enumerable")
    parts = []
    for p, U in run.universes():
        c = classify_rdp(U, run.cfg.bound)
        c.report.add(
            "strongest property",
            True,
            detail=c.strongest.value if c.strongest is not None else "none of RIP..RDP2",
        )
        parts.append((p, c.report))
    return _merge("rdp_classify", parts)


def suite_rdp1_refine(run):
    if not run.enumerable:
        return _skipped("rdp1_refine", f"{run.cfg.group} is not enumerable")
    from .sweep import compiled_sweep, reference_sweep

    A = run.lex
    fast = A.group.kind in (Kind.INTEGERS, Kind.INT_VECTORS) and A.m > 0
    rep = CheckReport("rdp1_refine")
    with timed(rep):
        res = compiled_sweep(A, run.cfg.bound) if fast else reference_sweep(A, run.cfg.bound)
        cases = ", ".join(f"{k}:{v}" for k, v in sorted(res.cases.items()))
        rep.add(
            "constructive table verifies",
            res.invalid_constructive == 0,
            res.first_failure,
            f"{res.quadruples} quadruples; cases {cases}",
        )
        rep.add("corner search finds a table", res.missing_corner == 0, res.first_failure)
        rep.add(
            "both methods agree on existence",
            res.disagreements == 0,
            f"{res.disagreements} disagreements" if res.disagreements else None,
        )
    return rep


def suite_rip(run):
    if not run.enumerable:
        return _skipped("rip", f"{run.cfg.group} is not enumerable")
    parts = []
    for p, U in run.universes():
        rep = CheckReport("rip")
        with timed(rep):
            res = rip_sweep(U, run.cfg.bound)
            rep.add("interpolation", res.failure is None, res.failure, f"{res.instances} instances")
        parts.append((p, rep))
    return _merge("rip", parts)


def suite_iso(run):
    if run.kite is None:
        return _skipped("iso", "needs lambda and rho")
    if not run.enumerable:
        return _skipped("iso", f"{run.cfg.group} is not enumerable")
    return check_iso(run.kite, run.cfg.bound)


def suite_mv(run):
    parts = []
    for p, U in run.universes():
        try:
            parts.append((p, check_mv_axioms(U, run.cfg.bound, **run.opts())))
        except Unavailable as exc:
            parts.append((p, _skipped("mv", str(exc))))
    return _merge("mv", parts)


def suite_state(run):
    return check_state(run.lex, canonical_state(run.lex), run.cfg.bound, **run.opts())


def suite_symmetric(run):
    """Compare the observed symmetry with the prediction from ``phi``.

    On ``[0, (n, e)]`` the negations are ``(n-k, y_{phi^n(i)})`` and
    ``(n-k, y_i)`` with ``y = x^-1``, so they agree exactly when ``phi^n`` is
    the identity (or the values are all trivial). The suite passes when
    observation and prediction match, so an asymmetric algebra is not
    reported as a failure.
    """
    A = run.lex
    predicted = A.phi.power(A.n).is_identity() or A.group.is_trivial or A.m == 0
    rep = CheckReport("symmetric")
    with timed(rep):
        observed = check_symmetric(A, run.cfg.bound, **run.opts())
        sym = observed.ok
        witness = observed.checks[0].counterexample
        detail = "symmetric" if sym else f"not symmetric, witness {witness}"
        rep.add(
            "symmetry matches phi^n",
            sym == predicted,
            f"predicted {'symmetric' if predicted else 'not symmetric'}, observed {detail}",
            detail,
        )
    return rep


def suite_normal_ideal(run):
    return check_normal_ideal(
        run.lex, lambda x: x.level == 0, run.cfg.bound, name="normal_ideal", **run.opts()
    )


def suite_irreducibility(run):
    rep = CheckReport("irreducibility")
    with timed(rep):
        d = decide_subdirect_irreducibility(run.lex)
        ok = None if d.decision is Decision.UNKNOWN else True
        rep.add(f"decision: {d.decision.value}", ok, detail=d.rationale)
        if d.description:
            rep.add("description", True, detail=d.description)
        if run.kite is not None:
            k = decide_subdirect_irreducibility(run.kite)
            rep.add("kite and model agree", k.decision == d.decision, f"kite {k.decision.value}, model {d.decision.value}")
    return rep


def suite_decompose(run):
    if not run.enumerable:
        return _skipped("decompose", f"{run.cfg.group} is not enumerable")
    dec = decompose(run.lex, run.cfg.bound)
    d = decide_subdirect_irreducibility(run.lex)
    if d.decision is Decision.YES:
        dec.report.add(
            "irreducible algebra has one factor",
            len(dec.factors) == 1,
            f"{len(dec.factors)} factors",
        )
    return dec.report


_SUITE_FNS = {name: globals()[f"suite_{name}"] for name in SUITES}


def run_suites(cfg: RunConfig):
    """Run the configured suites in order; a suite that cannot run reports ``skipped``."""
    run = Run(cfg)
    out = []
    for name in cfg.suites:
        try:
            rep = _SUITE_FNS[name](run)
        except Unavailable as exc:
            rep = _skipped(name, str(exc))
        rep.name = name
        out.append(rep)
    return out


# ----------------------------------------------------------------------
# output


def emit_report(cfg, reports, fmt="text", timings=False):
    """Render reports as text or JSON.

    ``elapsed_ms`` is written as 0 unless ``timings`` is set, so that the
    same configuration always produces the same bytes.
    """
    if fmt == "json":
        doc = {
            "config_digest": cfg.digest(),
            "suites": [
                {
                    "name": r.name,
                    "checks": [c.to_dict() for c in r.checks],
                    "elapsed_ms": r.elapsed_ms if timings else 0,
                }
                for r in reports
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    lines = [f"config {cfg.digest()[:16]}"]
    for r in reports:
        lines.append(r.summary() + (f"\n  ({r.elapsed_ms} ms)" if timings else ""))
    counts = {s: 0 for s in Status}
    for r in reports:
        for c in r.checks:
            counts[c.status] += 1
    lines.append(", ".join(f"{counts[s]} {s.value}" for s in Status))
    return "\n".join(lines) + "\n"


def exit_code(reports):
    return 1 if any(r.failed for r in reports) else 0


# ----------------------------------------------------------------------
# verbs


def _load(args):
    cfg = parse_config(args.config)
    if args.bound is not None:
        if args.bound < 1:
            raise ConfigError("bound", f"must be at least 1, got {args.bound}")
        cfg.bound = args.bound
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError("samples", f"must be at least 1, got {args.samples}")
        cfg.samples = args.samples
    check_size(cfg)
    return cfg


def cmd_check(args, out):
    cfg = _load(args)
    reports = run_suites(cfg)
    out.write(emit_report(cfg, reports, "json" if args.json else "text", args.timings))
    return exit_code(reports)


def cmd_classify(args, out):
    cfg = _load(args)
    run = Run(cfg)
    target = run.kite if run.kite is not None else run.lex
    d = decide_subdirect_irreducibility(target)
    factors, report = [], None
    if run.enumerable:
        dec = decompose(target, cfg.bound)
        factors = [
            {
                "indices": list(f.block),
                "phi": list(f.algebra.phi),
                "decision": f.decision.decision.value,
                "canonical_form": list(f.decision.canonical) if f.decision.canonical is not None else None,
            }
            for f in dec.factors
        ]
        report = dec.report
    if args.json:
        doc = {"config_digest": cfg.digest(), "irreducibility": d.to_dict(), "factors": factors}
        if report is not None:
            doc["checks"] = [c.to_dict() for c in report.checks]
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(f"subdirectly irreducible: {d.decision.value}\n  {d.rationale}\n")
        if d.description:
            out.write(f"  {d.description}\n")
        if d.canonical is not None:
            out.write(f"  renumbering: {list(d.canonical)}\n")
        for f in factors:
            out.write(f"factor on {f['indices']}: phi = {f['phi']}, irreducible: {f['decision']}\n")
        if report is not None:
            out.write(report.summary() + "\n")
    return 1 if report is not None and report.failed else 0


def cmd_refine(args, out):
    cfg = _load(args)
    A = NPerfectAlgebra.build(cfg.group, cfg.m, cfg.phi, cfg.n)
    xs = [A.parse(t) for t in (args.a1, args.a2, args.b1, args.b2)]
    amb = LexAmbient(A, cfg.bound)
    if args.search:
        t = brute_refine(amb, *xs)
        label = "corner search"
        if t is None:
            out.write("no RDP1 table inside the window\n")
            return 1
    else:
        res = lex_refine_rdp1(A, *xs)
        t = res.table
        label = f"case {res.case}" + (" (solved transposed)" if res.transposed else "")
    ok = verify_table(amb, t, *xs, RdpClass.RDP1)
    if args.json:
        doc = {
            "method": label,
            "table": [A.render(c) for c in t.entries()],
            "verified": ok,
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(f"{label}\n{render_table(amb, t, *xs)}\nverified: {ok}\n")
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="kitepea", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON configuration file or inline JSON")
        sp.add_argument("--json", action="store_true", help="emit JSON")
        sp.add_argument("--bound", type=int, help="override the window bound")
        sp.add_argument("--seed", type=int, help="override the sampling seed")
        sp.add_argument("--samples", type=int, help="override the sample count")
        sp.add_argument("--timings", action="store_true", help="report elapsed times")

    common(sub.add_parser("check", help="run the configured suites"))
    common(sub.add_parser("classify", help="irreducibility, canonical form and decomposition"))
    r = sub.add_parser("refine", help="refine one equation a1 + a2 = b1 + b2 and print the table")
    common(r)
    r.add_argument("--search", action="store_true", help="use the corner search instead of the constructive rule")
    for name in ("a1", "a2", "b1", "b2"):
        r.add_argument(name, help="element such as '(1)[-1,0]'")
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fn = {"check": cmd_check, "classify": cmd_classify, "refine": cmd_refine}[args.verb]
    try:
        return fn(args, out)
    except (ConfigError, UsageError) as exc:
        print(f"kitepea: error: {exc}", file=sys.stderr)
        return 2
    except KitepeaError as exc:  # pragma: no cover - defensive
        print(f"kitepea: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
