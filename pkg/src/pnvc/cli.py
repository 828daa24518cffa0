"""Command-line front end: a thin client over the service handlers.

Exit codes: 0 decided/success, 1 usage or IO error, 2 inconclusive,
3 property-suite failure.  PNVC_SEED overrides any --seed flag; an optional
JSON config file supplies flag defaults.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .net import NetError
from .service import handlers
from .service.models import (
    AnalyzeRequest, BoundedRequest, BoundsRequest, CoverRequest, GenRequest,
    McRequest,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_SUITE_FAILURE = 3


def _read_net(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_target(text: str) -> dict:
    out = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, raw = part.partition(":")
        try:
            out[name.strip()] = int(raw)
        except ValueError:
            raise click.ClickException(f"bad target entry {part!r}") from None
    return out


def _emit(data: dict, as_json: bool, text_lines=None):
    if as_json or text_lines is None:
        click.echo(json.dumps(data, sort_keys=True, default=str))
    else:
        for line in text_lines:
            click.echo(line)


def _seed_option(value: int) -> int:
    env = os.environ.get("PNVC_SEED")
    return int(env) if env else value


def _load_config(path):
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


pass_config = click.make_pass_decorator(dict, ensure=True)


@click.group()
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON file with flag defaults (keys mirror the flags)")
@click.pass_context
def main(ctx, config):
    """Petri net coverability/boundedness analysis."""
    ctx.obj = _load_config(config)


def _cfg(ctx_obj: dict, key: str, flag_value, fallback):
    """Explicit flag wins, then the config file, then the built-in default."""
    if flag_value is not None:
        return flag_value
    return ctx_obj.get(key, fallback)


@main.command()
@click.argument("net_path", type=click.Path())
@click.option("--approx", is_flag=True, help="greedy cover instead of exact")
@click.option("--budget", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@pass_config
def analyze(cfg, net_path, approx, budget, as_json):
    """Structural decomposition report."""
    try:
        resp = handlers.handle_analyze(AnalyzeRequest(
            net_text=_read_net(net_path), approx=approx, budget=budget))
    except NetError as exc:
        raise click.ClickException(str(exc)) from exc
    data = resp.model_dump()
    _emit(data, as_json, [
        f"k        = {resp.k}",
        f"k'       = {resp.k_prime}",
        f"cover    = {', '.join(resp.cover)}" + ("" if resp.cover_exact else " (approx)"),
        f"types    = {resp.num_types}",
        f"special  = {', '.join(resp.special)}",
        f"indep    = {', '.join(resp.independent) or '-'}",
    ])


@main.command()
@click.argument("net_path", type=click.Path(), required=False)
@click.option("--target", default="", help="place:count list for r")
@click.option("--i", "i_level", type=int, default=None)
@click.option("--j", type=int, default=1)
@click.option("--c-prime", type=int, default=2, show_default=True)
@click.option("--d", type=int, default=2, show_default=True)
@click.option("--u-prime", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--w", type=int, default=None)
@click.option("--k-prime", type=int, default=None)
@click.option("--r", type=int, default=None)
@click.option("--u", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@pass_config
def bounds(cfg, net_path, target, i_level, j, c_prime, d, u_prime, m, w,
           k_prime, r, u, as_json):
    """Sequence-length bounds for a net or explicit parameters."""
    try:
        req = BoundsRequest(
            net_text=_read_net(net_path) if net_path else None,
            target=_parse_target(target), i=i_level, j=j, c_prime=c_prime,
            d=d, u_prime=u_prime, m=m, w=w, k_prime=k_prime, r=r, u=u)
        resp = handlers.handle_bounds(req)
    except (NetError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    def fmt(record, label):
        l2 = f"{record.log2:.6g}" if record.log2 is not None else "-inf"
        at = f"i={record.i}" + (f",j={record.j}" if record.j is not None else "")
        return f"{label:<12} ({at}): exact={record.exact} log2={l2}"

    _emit(resp.model_dump(), as_json, [
        f"params      = {json.dumps(resp.params, sort_keys=True)}",
        fmt(resp.cover_bound, "cover bound"),
        fmt(resp.scs_bound, "scs bound"),
        fmt(resp.pump_bound, "pump bound"),
        f"constants   = c'={resp.constants['c_prime']} d={resp.constants['d']}",
    ])


@main.command()
@click.argument("net_path", type=click.Path())
@click.option("--target", required=True, help="place:count list")
@click.option("--method", default=None,
              type=click.Choice(["both", "forward", "backward"]),
              help="[default: both]")
@click.option("--max-len", type=int, default=None, help="[default: 10000]")
@click.option("--state-cap", type=int, default=None, help="[default: 1000000]")
@click.option("--node-cap", type=int, default=None, help="[default: 100000]")
@click.option("--json", "as_json", is_flag=True)
@pass_config
def cover(cfg, net_path, target, method, max_len, state_cap, node_cap, as_json):
    """Can the net reach a marking dominating the target?"""
    try:
        resp = handlers.handle_cover(CoverRequest(
            net_text=_read_net(net_path), target=_parse_target(target),
            method=_cfg(cfg, "method", method, "both"),
            max_len=_cfg(cfg, "max_len", max_len, 10_000),
            state_cap=_cfg(cfg, "state_cap", state_cap, 1_000_000),
            node_cap=_cfg(cfg, "node_cap", node_cap, 100_000)))
    except NetError as exc:
        raise click.ClickException(str(exc)) from exc
    witness = " ".join(resp.witness) if resp.witness else "-"
    _emit(resp.model_dump(), as_json, [
        f"verdict = {resp.verdict}",
        f"witness = {witness}",
        f"method  = {resp.method}",
    ])
    if not resp.decided:
        sys.exit(EXIT_INCONCLUSIVE)


@main.command()
@click.argument("net_path", type=click.Path())
@click.option("--method", default=None,
              type=click.Choice(["both", "karp-miller", "self-covering"]),
              help="[default: both]")
@click.option("--scs-max-len", type=int, default=None, help="[default: 12]")
@click.option("--node-cap", type=int, default=None, help="[default: 100000]")
@click.option("--json", "as_json", is_flag=True)
@pass_config
def bounded(cfg, net_path, method, scs_max_len, node_cap, as_json):
    """Is there a uniform cap on token counts over all reachable markings?"""
    try:
        resp = handlers.handle_bounded(BoundedRequest(
            net_text=_read_net(net_path),
            method=_cfg(cfg, "method", method, "both"),
            scs_max_len=_cfg(cfg, "scs_max_len", scs_max_len, 12),
            node_cap=_cfg(cfg, "node_cap", node_cap, 100_000)))
    except NetError as exc:
        raise click.ClickException(str(exc)) from exc
    _emit(resp.model_dump(), as_json, [
        f"verdict  = {resp.verdict}",
        f"method   = {resp.method}",
        f"evidence = {json.dumps(resp.evidence, sort_keys=True) if resp.evidence else '-'}",
    ])
    if not resp.decided:
        sys.exit(EXIT_INCONCLUSIVE)


@main.command()
@click.argument("net_path", type=click.Path())
@click.option("--formula", required=True)
@click.option("--max-depth", type=int, default=None, help="[default: 6]")
@click.option("--node-cap", type=int, default=None, help="[default: 100000]")
@click.option("--json", "as_json", is_flag=True)
@pass_config
def mc(cfg, net_path, formula, max_depth, node_cap, as_json):
    """Model check a formula of the query logic."""
    try:
        resp = handlers.handle_mc(McRequest(
            net_text=_read_net(net_path), formula=formula,
            max_depth=_cfg(cfg, "max_depth", max_depth, 6),
            node_cap=_cfg(cfg, "node_cap", node_cap, 100_000)))
    except NetError as exc:
        raise click.ClickException(str(exc)) from exc
    _emit(resp.model_dump(), as_json, [
        f"formula = {resp.formula}",
        f"verdict = {resp.verdict}",
    ])
    if resp.verdict == "inconclusive":
        sys.exit(EXIT_INCONCLUSIVE)


@main.command()
@click.option("--places", type=int, required=True)
@click.option("--transitions", type=int, required=True)
@click.option("--max-weight", type=int, default=1, show_default=True)
@click.option("--max-initial", type=int, default=1, show_default=True)
@click.option("--target-vc", type=int, default=None)
@click.option("--seed", type=int, default=None, help="[default: 0]")
@click.option("--json", "as_json", is_flag=True)
@pass_config
def gen(cfg, places, transitions, max_weight, max_initial, target_vc, seed,
        as_json):
    """Generate a random net (deterministic in the seed)."""
    try:
        resp = handlers.handle_gen(GenRequest(
            places=places, transitions=transitions, max_weight=max_weight,
            max_initial=max_initial, target_vc=target_vc,
            seed=_seed_option(_cfg(cfg, "seed", seed, 0))))
    except NetError as exc:
        raise click.ClickException(str(exc)) from exc
    if as_json:
        _emit(resp.model_dump(), True)
    else:
        click.echo(resp.net_text, nl=False)


@main.command()
@click.option("--suites", default="", help="comma list; default: all")
@click.option("--trials", type=int, default=None, help="[default: 200]")
@click.option("--seed", type=int, default=None, help="[default: 0]")
@click.option("--self-test", is_flag=True, hidden=True,
              help="corrupt transfers to validate the harness itself")
@click.option("--json", "as_json", is_flag=True)
@pass_config
def propcheck(cfg, suites, trials, seed, self_test, as_json):
    """Run the randomized property suites."""
    from .properties import propcheck as run_propcheck

    names = [s.strip() for s in suites.split(",") if s.strip()] \
        or cfg.get("suites") or None
    report = run_propcheck(names, _cfg(cfg, "trials", trials, 200),
                           _seed_option(_cfg(cfg, "seed", seed, 0)),
                           sabotage=self_test)
    lines = []
    for suite in report["suites"]:
        status = "pass" if suite["failed"] == 0 else "FAIL"
        lines.append(
            f"{suite['suite']:<18} {suite['passed']}/{suite['passed'] + suite['failed']}"
            f" {status}")
        if suite["counterexample"]:
            lines.append(f"  counterexample: {suite['counterexample']['message']}")
    _emit(report, as_json, lines)
    if not report["ok"]:
        sys.exit(EXIT_SUITE_FAILURE)


if __name__ == "__main__":
    main()
