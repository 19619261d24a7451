"""Command line frontend.

Every command emits one JSON report embedding the run configuration,
so any report can be reproduced by rerunning its config.  Exit codes:
0 success, 1 bound violation (or an unfulfillable construction),
2 usage error, 3 internal trichotomy violation.

The thread count is an execution detail, not part of the mathematical
configuration, so it is honored but never serialized: reports must be
byte-identical across thread counts.
"""

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from . import audit
from . import constructions as cs
from . import hermitian as hm
from . import jsonio as js
from . import poly as hp
from .errors import HVLabError, UsageError
from .field import quadratic_field

VALID_Q = (2, 3, 4, 5, 7, 8, 9)
QUADRIC_KINDS = ("TypeI", "TypeII", "TypeIII")


@dataclass
class RunConfig:
    command: str
    subcommand: Optional[str] = None
    q: Optional[int] = None
    d: Optional[int] = None
    m: Optional[int] = None
    seed: int = 0
    samples: Optional[int] = None
    kind: Optional[str] = None
    input: Optional[str] = None
    output: Optional[str] = None
    format: str = "json"

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"command": self.command}
        for key in (
            "subcommand",
            "q",
            "d",
            "m",
            "seed",
            "samples",
            "kind",
            "input",
            "output",
            "format",
        ):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


# ------------------------------------------------------------------ parsing


def _add_common(sub: argparse.ArgumentParser, *, q_required: bool = True) -> None:
    sub.add_argument("--q", type=int, required=q_required, help="base prime power")
    sub.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    sub.add_argument(
        "--threads",
        default=os.environ.get("HVLAB_THREADS", "auto"),
        help="worker threads, an integer or 'auto'",
    )
    sub.add_argument(
        "--format", choices=("json", "table"), default="json", help="output format"
    )
    sub.add_argument("--out", default=None, help="write the report here, not stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvlab",
        description=(
            "Hermitian threefolds over F_{q^2}: constructions, section "
            "classification, exact point counts, and bound verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build an extremal hypersurface")
    p.add_argument(
        "subcommand",
        choices=("edoukou", "sorensen", "degenerate", "quadric", "serre"),
    )
    p.add_argument("--d", type=int, default=2, help="hypersurface degree")
    p.add_argument("--m", type=int, default=4, help="ambient dimension (serre)")
    p.add_argument(
        "--kind", choices=QUADRIC_KINDS, default="TypeI", help="quadric type"
    )
    _add_common(p)

    p = sub.add_parser("classify", help="classify a section or a curve")
    p.add_argument(
        "subcommand",
        choices=("line", "plane", "hyperplane", "quadric", "plane-cubic"),
    )
    p.add_argument("--in", dest="input", required=True, help="input JSON document")
    _add_common(p)

    p = sub.add_parser("count", help="count variety points on a hypersurface")
    p.add_argument("--in", dest="input", required=True, help="polynomial JSON")
    _add_common(p)

    p = sub.add_parser("audit", help="count and check every applicable bound")
    p.add_argument("--in", dest="input", required=True, help="polynomial JSON")
    _add_common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("subcommand", choices=("identities", "bounds"))
    _add_common(p)

    p = sub.add_parser("sample", help="seeded random hypersurface campaign")
    p.add_argument("--d", type=int, default=2, help="hypersurface degree")
    p.add_argument("--m", type=int, default=4, help="ambient dimension, 3 or 4")
    p.add_argument("--samples", type=int, default=100, help="sample count")
    _add_common(p)

    return parser


def _resolve_threads(raw: Any) -> Optional[int]:
    if raw is None or raw == "auto":
        return None
    try:
        n = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"--threads must be an integer or 'auto', got {raw!r}")
    if n < 1:
        raise UsageError("--threads must be positive")
    return n


def _config_from_ns(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command,
        subcommand=getattr(ns, "subcommand", None),
        q=ns.q,
        d=getattr(ns, "d", None),
        m=getattr(ns, "m", None),
        seed=getattr(ns, "seed", 0),
        samples=getattr(ns, "samples", None),
        kind=getattr(ns, "kind", None),
        input=getattr(ns, "input", None),
        output=ns.out,
        format=ns.format,
    )
    if cfg.q not in VALID_Q:
        raise UsageError(f"q must be one of {list(VALID_Q)}, got {cfg.q}")
    if cfg.d is not None and cfg.d < 1:
        raise UsageError(f"d must be positive, got {cfg.d}")
    if not 0 <= cfg.seed < 2**64:
        raise UsageError("seed must fit in an unsigned 64-bit integer")
    if cfg.samples is not None and cfg.samples < 0:
        raise UsageError("samples must be non-negative")
    if cfg.command == "construct" and cfg.subcommand == "quadric":
        cfg.d = 2
    else:
        cfg.kind = None
    if cfg.command == "construct" and cfg.subcommand in ("sorensen", "degenerate"):
        cfg.m = None
    return cfg


# --------------------------------------------------------------- dispatch


def _load_poly_for(cfg: RunConfig) -> hp.HomogeneousPoly:
    f = js.polynomial_from_document(js.read_document(cfg.input))
    fld = quadratic_field(cfg.q)
    if f.field.size != fld.size or f.field.p != fld.p:
        raise UsageError(
            f"polynomial lives over F_{f.field.size}, not F_{fld.size} from --q {cfg.q}"
        )
    return f


def _standard_form(q: int, m: int) -> hm.HermitianForm:
    return hm.hermitian_identity(quadratic_field(q), m)


def _run_construct(cfg: RunConfig) -> Tuple[Dict[str, Any], bool]:
    q, d = cfg.q, cfg.d
    if cfg.subcommand == "edoukou":
        f, cert = cs.edoukou_extremal(q, d)
    elif cfg.subcommand == "sorensen":
        f, cert = cs.sorensen_extremal(q, d)
    elif cfg.subcommand == "degenerate":
        f, cert = cs.degenerate_extremal(q, d)
    elif cfg.subcommand == "quadric":
        f, cert = cs.quadric_of_type(cfg.kind, q)
    else:
        f, cert = cs.serre_extremal(q, d, cfg.m)
    report = js.construction_document(f, cert)
    report["count"] = cert.claimed_count
    return report, False


def _classify_flat(cfg: RunConfig) -> Dict[str, Any]:
    fld = quadratic_field(cfg.q)
    flat = js.flat_from_json(js.read_document(cfg.input), fld)
    h = _standard_form(cfg.q, flat.m)
    want = {"line": 1, "plane": 2, "hyperplane": flat.m - 1}[cfg.subcommand]
    if flat.dim != want:
        raise UsageError(
            f"classify {cfg.subcommand} needs a flat of dim {want}, got {flat.dim}"
        )
    if cfg.subcommand == "line":
        res = hm.classify_line(h, flat)
        return {"tag": res.tag, "count": res.meeting_count}
    if cfg.subcommand == "plane":
        res = hm.classify_plane_section(h, flat)
        out: Dict[str, Any] = {"tag": res.tag, "count": res.count}
        if res.center is not None:
            out["center"] = list(res.center.coords)
        return out
    res = hm.classify_hyperplane_section(h, flat)
    out = {"tag": res.tag, "count": res.count}
    if res.point is not None:
        out["point"] = list(res.point.coords)
    return out


def _run_classify(cfg: RunConfig) -> Tuple[Dict[str, Any], bool]:
    if cfg.subcommand in ("line", "plane", "hyperplane"):
        return _classify_flat(cfg), False
    f = _load_poly_for(cfg)
    if cfg.subcommand == "quadric":
        h = _standard_form(cfg.q, f.nvars - 1)
        res = hm.classify_quadric(f, h)
        return {
            "tag": res.tag,
            "count": audit.count_intersection(f, h),
            "components": [js.flat_to_json(x) for x in res.components],
        }, False
    res = hp.classify_plane_cubic(f)
    return {"tag": res.tag, "count": int(len(hp.zero_ids(f)))}, False


def _run_count(cfg: RunConfig, threads: Optional[int]) -> Tuple[Dict[str, Any], bool]:
    f = _load_poly_for(cfg)
    h = _standard_form(cfg.q, f.nvars - 1)
    n = audit.count_intersection(f, h, threads=threads)
    return {"q": cfg.q, "d": f.degree, "m": f.nvars - 1, "count": n}, False


def _run_audit(cfg: RunConfig, threads: Optional[int]) -> Tuple[Dict[str, Any], bool]:
    f = _load_poly_for(cfg)
    h = _standard_form(cfg.q, f.nvars - 1)
    rep = audit.audit(f, h, threads=threads)
    return js.audit_report_to_json(rep), bool(rep.violations)


def _run_verify(cfg: RunConfig, threads: Optional[int]) -> Tuple[Dict[str, Any], bool]:
    if cfg.subcommand == "identities":
        rep = audit.verify_identity_suite(cfg.q, threads=threads)
    else:
        rep = audit.verify_bounds_suite(cfg.q, threads=threads)
    return rep, bool(rep["violations"])


def _run_sample(cfg: RunConfig, threads: Optional[int]) -> Tuple[Dict[str, Any], bool]:
    rep = audit.sample_hypersurfaces(
        cfg.q, cfg.d, cfg.samples, cfg.seed, m=cfg.m, threads=threads
    )
    return js.sampling_report_to_json(rep), bool(rep.violations)


# ----------------------------------------------------------------- output


def _table_lines(obj: Any, prefix: str = "") -> List[str]:
    lines: List[str] = []
    if isinstance(obj, dict):
        for key, val in obj.items():
            name = f"{prefix}{key}"
            if isinstance(val, dict):
                lines.extend(_table_lines(val, name + "."))
            elif isinstance(val, list) and val and isinstance(val[0], dict):
                for i, item in enumerate(val):
                    cells = ", ".join(f"{k}={_cell(v)}" for k, v in item.items())
                    lines.append(f"{name}[{i}]  {cells}")
            else:
                lines.append(f"{name}: {_cell(val)}")
    else:
        lines.append(f"{prefix}{_cell(obj)}")
    return lines


def _cell(val: Any) -> str:
    if isinstance(val, (dict, list)):
        return js.dumps(val).replace("\n", " ").strip()
    return str(val)


def _emit(report: Dict[str, Any], cfg: RunConfig) -> None:
    if cfg.format == "table":
        text = "\n".join(_table_lines(report)) + "\n"
    else:
        text = js.dumps(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------- entry


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = _config_from_ns(ns)
        threads = _resolve_threads(ns.threads)
        if cfg.command == "construct":
            payload, violated = _run_construct(cfg)
        elif cfg.command == "classify":
            payload, violated = _run_classify(cfg)
        elif cfg.command == "count":
            payload, violated = _run_count(cfg, threads)
        elif cfg.command == "audit":
            payload, violated = _run_audit(cfg, threads)
        elif cfg.command == "verify":
            payload, violated = _run_verify(cfg, threads)
        else:
            payload, violated = _run_sample(cfg, threads)
    except HVLabError as exc:
        sys.stderr.write(f"hvlab: {exc}\n")
        return exc.exit_code
    report = {"config": cfg.to_json()}
    report.update(payload)
    _emit(report, cfg)
    return 1 if violated else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
