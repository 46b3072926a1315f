"""Command-line front end: ``dbe <subcommand> ...``.

Exit codes: 0 success, 1 selftest failure, 2 usage, 3 validation failure,
4 decapsulation gave no key or an artifact does not match, 5 I/O error.
Session keys are printed as lowercase hex on a final line ``CK: <hex>``.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from . import wire
from .dbe_ad import ad_decaps, ad_encaps, ad_gen_key, ad_is_valid, ad_setup, ad_sizes
from .dbe_ss import PublicParams, ss_decaps, ss_encaps, ss_gen_key, ss_is_valid, ss_setup, ss_sizes
from .directory import dir_create, dir_get, dir_load, dir_register
from .errors import (
    BindingError,
    DBEError,
    DirectoryError,
    InvalidBits,
    InvalidKey,
    MalformedEncoding,
    MalformedKey,
    MissingIndex,
    MissingKey,
    StrictModeInvalid,
)
from .groups import GroupParams, generate_params

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_BOTTOM = 4
EXIT_IO = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _seed_bytes(text: Optional[str]) -> Optional[bytes]:
    if text is None:
        return None
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be hex, got {text!r}") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _rng(args, *labels) -> random.Random:
    """Deterministic per-command stream under --seed, OS entropy otherwise."""
    if args.seed is None:
        return random.SystemRandom()
    tag = "|".join(str(x) for x in (args.command,) + labels)
    return random.Random(args.seed + b"|" + tag.encode())


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror}") from None


def _warn_toy(params: GroupParams) -> None:
    if params.toy:
        print(f"warning: toy parameters (N has {params.N.bit_length()} bits); not secure",
              file=sys.stderr)


def _load_pp(path: str) -> PublicParams:
    try:
        pp = wire.decode_pp(_read(path))
    except MalformedEncoding as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from None
    _warn_toy(pp.params)
    return pp


def _load_dir(path: str, pp: PublicParams):
    try:
        return dir_load(path, pp)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"directory {path} does not exist") from None
    except BindingError as exc:
        raise CliError(EXIT_BOTTOM, str(exc)) from None


def _print_ck(ck) -> None:
    print(f"CK: {ck.hex()}")


# -- subcommands ---------------------------------------------------------------------

def cmd_setup(args) -> int:
    if args.users < 1 or args.lam < 8:
        raise CliError(EXIT_USAGE, "--users must be >= 1 and --lambda >= 8")
    seed = args.seed if args.seed is not None else os.urandom(16)
    try:
        params = generate_params(args.backend, args.prime_bits, seed)
    except InvalidBits as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    _warn_toy(params)
    rng = _rng(args)
    make = ad_setup if args.scheme == "ad" else ss_setup
    pp = make(rng, params, args.users, args.lam)
    _write(args.out, wire.encode_pp(pp))
    print(f"wrote {args.scheme.upper()} parameters for {args.users} users to {args.out}")
    print(f"pp-digest: {wire.pp_digest(pp)}")
    return EXIT_OK


def cmd_keygen(args) -> int:
    pp = _load_pp(args.pp)
    rng = _rng(args, args.index)
    if pp.scheme == "AD":
        kp = ad_gen_key(rng, args.index, pp)
        usk, upk = wire.encode_ad_usk(kp, pp), wire.encode_ad_upk(kp.public, pp)
    else:
        sk, pk = ss_gen_key(rng, args.index, pp)
        usk, upk = wire.encode_usk(sk, pp), wire.encode_upk(pk, pp)
    _write(args.out_usk, usk)
    _write(args.out_upk, upk)
    print(f"wrote key pair for index {args.index}")
    return EXIT_OK


def _decode_upk(path: str, pp: PublicParams):
    try:
        return wire.decode_public_key(_read(path), pp)
    except MalformedEncoding as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from None


def _valid(j: int, upk, pp: PublicParams) -> bool:
    try:
        return ad_is_valid(j, upk, pp) if pp.scheme == "AD" else ss_is_valid(j, upk, pp)
    except MalformedKey:
        return False


def cmd_validate(args) -> int:
    pp = _load_pp(args.pp)
    ok = _valid(args.index, _decode_upk(args.upk, pp), pp)
    print("VALID" if ok else "INVALID")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_register(args) -> int:
    pp = _load_pp(args.pp)
    upk = _decode_upk(args.upk, pp)
    if os.path.exists(args.dir):
        d = _load_dir(args.dir, pp)
    else:
        d = dir_create(pp, pp.scheme, args.dir)
    try:
        dir_register(d, args.index, upk, strict=args.strict)
    except StrictModeInvalid as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    except DirectoryError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    e = d.entries[args.index]
    print(f"registered index {args.index} seq {e.seq} validated {str(e.validated).lower()}")
    return EXIT_OK


def _fetch(d, S, strict: bool = False):
    try:
        return dir_get(d, S, strict=strict)
    except MissingIndex as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    except DirectoryError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None


def cmd_encaps(args) -> int:
    pp = _load_pp(args.pp)
    d = _load_dir(args.dir, pp)
    upks = _fetch(d, args.set, strict=args.strict)
    rng = _rng(args, ",".join(map(str, sorted(set(args.set)))))
    try:
        if pp.scheme == "AD":
            ch, ck = ad_encaps(rng, args.set, upks, pp)
            data = wire.encode_ad_ch(ch, pp)
        else:
            ch, ck = ss_encaps(rng, args.set, upks, pp)
            data = wire.encode_ch(ch, pp)
    except (InvalidKey, MalformedKey, MissingKey) as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    _write(args.out_header, data)
    _print_ck(ck)
    return EXIT_OK


def cmd_decaps(args) -> int:
    pp = _load_pp(args.pp)
    S = set(args.set)
    if args.index not in S:
        print("BOTTOM")
        return EXIT_BOTTOM
    d = _load_dir(args.dir, pp)
    upks = _fetch(d, S)
    try:
        if pp.scheme == "AD":
            key = wire.decode_ad_usk(_read(args.usk), pp)
            ch = wire.decode_ad_ch(_read(args.header), pp)
        else:
            key = wire.decode_usk(_read(args.usk), pp)
            ch = wire.decode_ch(_read(args.header), pp)
        if key.i != args.index:
            raise MalformedEncoding(f"secret key belongs to index {key.i}")
        ck = ad_decaps(S, ch, args.index, key, upks, pp) if pp.scheme == "AD" \
            else ss_decaps(S, ch, args.index, key, upks, pp)
    except DBEError:
        ck = None
    if ck is None:
        print("BOTTOM")
        return EXIT_BOTTOM
    _print_ck(ck)
    return EXIT_OK


def closed_form_counts(scheme: str, L: int) -> Dict[str, tuple]:
    """Expected (G, GT) element counts per artifact for ``L`` users."""
    if scheme == "AD":
        return {"pp": (6 * L + 1, 1), "usk": (1, 0), "upk": (4 * L, 0), "ch": (4, 0)}
    return {"pp": (3 * L + 1, 1), "usk": (1, 0), "upk": (L, 0), "ch": (2, 0)}


def _timed(fn: Callable):
    t0 = time.perf_counter()
    out = fn()
    return time.perf_counter() - t0, out


def bench_one(params: GroupParams, scheme: str, lam: int, L: int, seed: bytes) -> dict:
    rng = random.Random(seed + b"|bench|" + str(L).encode())
    S = list(range(1, L + 1))
    if scheme == "AD":
        t_setup, pp = _timed(lambda: ad_setup(rng, params, L, lam))
        t_key, _ = _timed(lambda: ad_gen_key(rng, 1, pp))
        keys = {j: ad_gen_key(rng, j, pp) for j in S}
        upks = {j: k.public for j, k in keys.items()}
        t_valid, _ = _timed(lambda: ad_is_valid(1, upks[1], pp))
        t_enc, (ch, ck) = _timed(lambda: ad_encaps(rng, S, upks, pp, validate=False))
        t_dec, out = _timed(lambda: ad_decaps(S, ch, 1, keys[1], upks, pp))
        sizes = ad_sizes(pp, rng)
        ch_bits = sizes.pop("ch_bits")
    else:
        t_setup, pp = _timed(lambda: ss_setup(rng, params, L, lam))
        t_key, _ = _timed(lambda: ss_gen_key(rng, 1, pp))
        keys = {j: ss_gen_key(rng, j, pp) for j in S}
        upks = {j: k[1] for j, k in keys.items()}
        t_valid, _ = _timed(lambda: ss_is_valid(1, upks[1], pp))
        t_enc, (ch, ck) = _timed(lambda: ss_encaps(rng, S, upks, pp, validate=False))
        t_dec, out = _timed(lambda: ss_decaps(S, ch, 1, keys[1][0], upks, pp))
        sizes = ss_sizes(pp, rng)
        ch_bits = 0
    return {
        "L": L, "sizes": sizes, "ch_bits": ch_bits, "correct": out == ck,
        "times": {"setup": t_setup, "keygen": t_key, "validate": t_valid,
                  "encaps": t_enc, "decaps": t_dec},
    }


def cmd_bench(args) -> int:
    pp = _load_pp(args.pp)
    seed = args.seed if args.seed is not None else b"bench"
    jobs = [(pp.params, pp.scheme, pp.lam, L, seed) for L in args.sweep]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            rows = list(ex.map(bench_one, *zip(*jobs)))
    else:
        rows = [bench_one(*j) for j in jobs]
    print(f"scheme {pp.scheme}  backend {pp.params.backend.value}  lambda {pp.lam}")
    print(f"{'L':>4} {'PP(G,GT)':>10} {'USK':>4} {'UPK':>4} {'CH':>4} "
          f"{'setup':>9} {'keygen':>9} {'valid':>9} {'encaps':>9} {'decaps':>9}")
    ok = True
    for r in rows:
        s, t = r["sizes"], r["times"]
        expected = closed_form_counts(pp.scheme, r["L"])
        match = all(s[k] == expected[k] for k in expected) and r["correct"]
        if pp.scheme == "AD":
            match &= r["ch_bits"] == 2 * pp.lam + 1
        ok &= match
        print(f"{r['L']:>4} {'%d,%d' % s['pp']:>10} {s['usk'][0]:>4} {s['upk'][0]:>4} {s['ch'][0]:>4} "
              + " ".join(f"{t[k] * 1e3:>7.1f}ms" for k in ("setup", "keygen", "validate", "encaps", "decaps"))
              + ("" if match else "  MISMATCH"))
    print("closed forms: " + ("match" if ok else "MISMATCH"))
    return EXIT_OK if ok else EXIT_INVALID


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    seed = args.seed if args.seed is not None else b"selftest"
    ok, report = run_selftest(seed, fault=args.inject_fault)
    print(report)
    return EXIT_OK if ok else EXIT_SELFTEST


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed_bytes, default=argparse.SUPPRESS,
                        help="hex seed making the command deterministic")

    parser = argparse.ArgumentParser(prog="dbe", parents=[common],
                                     description="Distributed broadcast encryption toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("setup", cmd_setup, "generate group and public parameters")
    p.add_argument("--scheme", choices=("ss", "ad"), default="ss")
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, default=32)
    p.add_argument("--backend", choices=("curve", "symbolic"), default="curve")
    p.add_argument("--prime-bits", type=int, default=20)
    p.add_argument("--out", required=True)

    p = add("keygen", cmd_keygen, "generate a user key pair")
    p.add_argument("--pp", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--out-usk", required=True)
    p.add_argument("--out-upk", required=True)

    p = add("register", cmd_register, "deposit a public key in a directory")
    p.add_argument("--pp", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--upk", required=True)
    p.add_argument("--strict", action="store_true", help="reject keys that fail validation")

    p = add("validate", cmd_validate, "check a public key against the parameters")
    p.add_argument("--pp", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--upk", required=True)

    p = add("encaps", cmd_encaps, "encapsulate a session key to a set of users")
    p.add_argument("--pp", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--set", type=_int_list, required=True)
    p.add_argument("--out-header", required=True)
    p.add_argument("--strict", action="store_true", help="refuse unvalidated directory entries")

    p = add("decaps", cmd_decaps, "recover a session key from a header")
    p.add_argument("--pp", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--set", type=_int_list, required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--usk", required=True)
    p.add_argument("--header", required=True)

    p = add("bench", cmd_bench, "element counts and timings over a sweep of L")
    p.add_argument("--pp", required=True)
    p.add_argument("--sweep", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--workers", type=int, default=1)

    p = add("selftest", cmd_selftest, "run the invariant suites at toy parameters")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    if not hasattr(args, "seed"):
        args.seed = None
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DBEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
