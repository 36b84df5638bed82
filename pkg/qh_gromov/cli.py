"""
QH Gromov - 명령줄 진입점

하위 명령:
    distance, arc, product, delta, sequence, sandwich, subdivide, lemma31, theorem13

종료 코드:
    0 성공, 1 사용법/설정/계산 오류, 2 검사 실패 (상한 위반)

음수 좌표는 `--to=-1,0` 처럼 `=`로 붙여 씁니다.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

from pydantic import ValidationError

from .curve import Arc, read_points_csv
from .domain import BaseDomain, Point2, load_domain
from .engine import QhEngine
from .errors import QhError
from .gromov import (
    DistanceMatrix,
    SequencePrefix,
    equivalence_diagnostics,
    four_point_delta,
    gromov_product,
    sequence_diagnostics,
)
from .harness import lemma31_construct, theorem13_construct
from .report import Report, RunConfig, engine_summary, write_arcs, write_report
from .settings import EngineSettings, HarnessSettings
from .shortarc import is_h_short, subdivide_triangle, verify_product_sandwich


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FINDING = 2

COMMANDS = ("distance", "arc", "product", "delta", "sequence", "sandwich", "subdivide", "lemma31", "theorem13")


class _Parser(argparse.ArgumentParser):
    """사용법 오류를 종료 코드 1로 처리하는 파서"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: 오류: {message}\n")


@dataclass
class CommandResult:
    """하위 명령 결과"""
    result: dict
    checks: dict[str, bool] = field(default_factory=dict)
    arcs: dict[str, Optional[Arc]] = field(default_factory=dict)


@dataclass
class Context:
    """해석된 실행 환경"""
    args: argparse.Namespace
    domain: BaseDomain
    engine: QhEngine
    harness: HarnessSettings
    tol: float
    h: float
    seed: int


def _point(text: str) -> Point2:
    try:
        return Point2.parse(text)
    except QhError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    """argparse 파서 구성"""
    common = _Parser(add_help=False)
    common.add_argument("--domain", required=True, help="영역 JSON 경로 또는 등록된 이름 (예: half_plane)")
    common.add_argument("--tol", type=float, default=None, help="거리 허용오차 (기본: defaults.yaml)")
    common.add_argument("--h", type=float, default=None, help="h-short 매개변수 (기본: defaults.yaml)")
    common.add_argument("--seed", type=int, default=None, help="표본 시드 (기본: 0)")
    common.add_argument("--out", type=str, default=None, help="JSON 보고서 경로")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v: INFO, -vv: DEBUG")

    parser = _Parser(prog="qh_cli", description="QH Gromov - 준쌍곡 거리와 그로모프 구성 검증")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(COMMANDS) + "}")

    p = sub.add_parser("distance", parents=[common], help="준쌍곡 거리 추정")
    p.add_argument("--from", dest="x", type=_point, required=True)
    p.add_argument("--to", dest="y", type=_point, required=True)

    p = sub.add_parser("arc", parents=[common], help="h-short 호 인증")
    p.add_argument("--from", dest="x", type=_point, required=True)
    p.add_argument("--to", dest="y", type=_point, required=True)

    p = sub.add_parser("product", parents=[common], help="그로모프 곱 (x|y)_w")
    p.add_argument("--x", type=_point, required=True)
    p.add_argument("--y", type=_point, required=True)
    p.add_argument("--w", type=_point, required=True)

    p = sub.add_parser("delta", parents=[common], help="점 집합의 4점 δ")
    p.add_argument("--points", required=True, help="점 CSV (헤더 x,y)")

    p = sub.add_parser("sequence", parents=[common], help="prefix 그로모프 수열 진단")
    p.add_argument("--prefix", required=True, help="prefix CSV")
    p.add_argument("--basepoint", type=_point, required=True)
    p.add_argument("--tail", type=int, default=None, help="꼬리 길이 (기본: 전체)")
    p.add_argument("--scale", type=float, default=None, help="판정 척도 T")
    p.add_argument("--prefix-b", dest="prefix_b", default=None, help="동치 진단용 두 번째 prefix CSV")

    p = sub.add_parser("sandwich", parents=[common], help="h-short 호 곱 샌드위치 검증")
    p.add_argument("--from", dest="x", type=_point, required=True)
    p.add_argument("--to", dest="y", type=_point, required=True)
    p.add_argument("--samples", type=int, default=10)

    p = sub.add_parser("subdivide", parents=[common], help="h-short 삼각형 분할")
    p.add_argument("--z", type=_point, required=True)
    p.add_argument("--x", type=_point, required=True)
    p.add_argument("--y", type=_point, required=True)

    p = sub.add_parser("lemma31", parents=[common], help="h-short 호 수열과 길이 사상 구성")
    p.add_argument("--basepoint", type=_point, required=True)
    p.add_argument("--prefix", required=True, help="prefix CSV")
    p.add_argument("--mmax", type=int, required=True)

    p = sub.add_parser("theorem13", parents=[common], help="두 수열 사이 삼각형 구성과 변위 검사")
    p.add_argument("--basepoint", type=_point, required=True)
    p.add_argument("--prefix-a", dest="prefix_a", required=True)
    p.add_argument("--prefix-b", dest="prefix_b", required=True)
    p.add_argument("--imax", type=int, required=True)

    return parser


# ========== 하위 명령 ==========

def run_distance(ctx: Context) -> CommandResult:
    a = ctx.args
    est = ctx.engine.distance(a.x, a.y, ctx.tol)
    result = {"from": a.x.to_list(), "to": a.y.to_list(), "j_lower": ctx.domain.j_distance(a.x, a.y)}
    result.update(est.to_dict())
    return CommandResult(result, arcs={"path": est.path})


def run_arc(ctx: Context) -> CommandResult:
    a = ctx.args
    cert = ctx.engine.short_arc(a.x, a.y, ctx.h)
    return CommandResult(cert.to_dict(), {"h_short": is_h_short(cert, ctx.h)}, {"arc": cert.arc})


def run_product(ctx: Context) -> CommandResult:
    a = ctx.args
    record = gromov_product(ctx.engine, a.x, a.y, a.w, ctx.tol)
    result = record.to_dict()
    result["upper_bound"] = record.upper_bound
    return CommandResult(result, {"within_bounds": record.within_bounds()})


def run_delta(ctx: Context) -> CommandResult:
    points = read_points_csv(ctx.args.points)
    matrix = DistanceMatrix.compute(ctx.engine, points, ctx.tol)
    estimate = four_point_delta(
        matrix,
        exhaustive_max=ctx.harness.delta_exhaustive_max,
        samples=ctx.harness.delta_sampled_quadruples,
        seed=ctx.seed,
    )
    result = estimate.to_dict()
    result["points"] = [p.to_list() for p in points]
    return CommandResult(result)


def run_sequence(ctx: Context) -> CommandResult:
    a = ctx.args
    points = read_points_csv(a.prefix)
    prefix = SequencePrefix.compute(ctx.engine, points, a.basepoint, ctx.tol)
    diag = sequence_diagnostics(prefix, a.tail or len(points), a.scale)
    result = diag.to_dict()
    result["pair_products"] = prefix.pair_products
    if a.prefix_b:
        other = read_points_csv(a.prefix_b)
        result["equivalence"] = equivalence_diagnostics(
            ctx.engine, points, other, a.basepoint, ctx.tol, scale=a.scale
        ).to_dict()
    return CommandResult(result)


def run_sandwich(ctx: Context) -> CommandResult:
    a = ctx.args
    cert = ctx.engine.short_arc(a.x, a.y, ctx.h)
    report = verify_product_sandwich(ctx.engine, cert, a.samples, ctx.h)
    result = report.to_dict()
    result["certificate"] = cert.to_dict()
    return CommandResult(result, {"sandwich": report.passed}, {"arc": cert.arc})


def run_subdivide(ctx: Context) -> CommandResult:
    a = ctx.args
    beta = ctx.engine.short_arc(a.z, a.x, ctx.h)
    gamma = ctx.engine.short_arc(a.z, a.y, ctx.h)
    alpha = ctx.engine.short_arc(a.x, a.y, ctx.h)
    tri = subdivide_triangle(beta, gamma, alpha, ctx.h)
    arcs = {}
    for name, side in (("alpha", tri.alpha), ("beta", tri.beta), ("gamma", tri.gamma)):
        arcs[f"{name}_prime"] = side.prime
        arcs[f"{name}_star"] = side.star
        arcs[f"{name}_doubleprime"] = side.doubleprime
    return CommandResult(tri.to_dict(), dict(tri.checks), arcs)


def run_lemma31(ctx: Context) -> CommandResult:
    a = ctx.args
    prefix = read_points_csv(a.prefix)
    run = lemma31_construct(ctx.engine, a.basepoint, prefix, ctx.h, a.mmax, ctx.harness)
    arcs = {f"beta_{m}": cert.arc for m, cert in enumerate(run.betas, start=1)}
    return CommandResult(run.to_dict(), run.checks, arcs)


def run_theorem13(ctx: Context) -> CommandResult:
    a = ctx.args
    prefix_a = read_points_csv(a.prefix_a)
    prefix_b = read_points_csv(a.prefix_b)
    run = theorem13_construct(ctx.engine, a.basepoint, prefix_a, prefix_b, ctx.h, a.imax, ctx.harness)
    arcs = {}
    for i, (beta, gamma, alpha) in enumerate(zip(run.betas, run.gammas, run.alphas), start=1):
        arcs[f"beta_{i}"] = beta.arc
        arcs[f"gamma_{i}"] = gamma.arc
        arcs[f"alpha_{i}"] = alpha.arc
    return CommandResult(run.to_dict(), run.checks, arcs)


HANDLERS: dict[str, Callable[[Context], CommandResult]] = {
    "distance": run_distance,
    "arc": run_arc,
    "product": run_product,
    "delta": run_delta,
    "sequence": run_sequence,
    "sandwich": run_sandwich,
    "subdivide": run_subdivide,
    "lemma31": run_lemma31,
    "theorem13": run_theorem13,
}


# ========== 실행 ==========

def _configure_logging(verbose: int):
    level = logging.WARNING if verbose <= 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _params(args: argparse.Namespace) -> dict:
    skip = {"command", "domain", "tol", "h", "seed", "out", "verbose"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = value.to_list() if isinstance(value, Point2) else value
    return out


def _print_banner(config: RunConfig, domain: BaseDomain):
    print("=" * 60)
    print(f"QH Gromov - {config.command}")
    print("=" * 60)
    print(f"영역: {config.domain_ref} ({domain.kind})")
    print(f"tol: {config.tol:g}, h: {config.h:g}, 시드: {config.seed}")
    print()


def dispatch(argv: Optional[list[str]] = None) -> int:
    """
    명령 실행

    Args:
        argv: 인자 목록 (None이면 sys.argv)

    Returns:
        종료 코드 (0 성공, 1 오류, 2 검사 실패)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else EXIT_OK
    _configure_logging(args.verbose)

    config: Optional[RunConfig] = None
    engine: Optional[QhEngine] = None
    try:
        domain = load_domain(args.domain)
        engine_settings = EngineSettings()
        harness_overrides = {k: v for k, v in (("h", args.h), ("seed", args.seed)) if v is not None}
        harness = HarnessSettings(**harness_overrides)
        tol = engine_settings.tol if args.tol is None else args.tol
        config = RunConfig(
            command=args.command,
            domain=domain.to_spec(),
            domain_ref=str(args.domain),
            params=_params(args),
            tol=tol,
            h=harness.h,
            seed=harness.seed,
            out=args.out,
            engine=engine_settings.model_dump(),
            harness=harness.model_dump(),
        )
        _print_banner(config, domain)

        engine = QhEngine(domain, engine_settings)
        ctx = Context(args, domain, engine, harness, config.tol, config.h, config.seed)
        outcome = HANDLERS[args.command](ctx)
    except (QhError, ValidationError) as e:
        message = str(e).splitlines()[0] if str(e) else type(e).__name__
        print(f"{type(e).__name__}: {message}", file=sys.stderr)
        if args.out and config is not None:
            report = Report(
                command=args.command,
                config=config,
                passed=False,
                error=f"{type(e).__name__}: {message}",
                engine=engine_summary(engine.stats if engine else None),
            )
            write_report(report, args.out)
        return EXIT_ERROR

    passed = all(outcome.checks.values())
    report = Report(
        command=args.command,
        config=config,
        result=outcome.result,
        checks=outcome.checks,
        passed=passed,
        engine=engine_summary(engine.stats),
    )
    if args.out:
        report.artifacts = write_arcs(outcome.arcs, args.out)
        write_report(report, args.out)

    failed = [name for name, ok in outcome.checks.items() if not ok]
    status = "통과" if passed else f"검사 실패 {failed}"
    print(f"[결과] {args.command}: {status}, 보고서: {args.out or '-'}")
    return EXIT_OK if passed else EXIT_FINDING


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
