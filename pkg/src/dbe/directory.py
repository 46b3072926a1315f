"""Public-key directory persisted as a canonical UTF-8 manifest.

Layout (one LF after every line, entries sorted by index)::

    dbe-dir v1
    scheme: SS|AD
    L: <users>
    lambda: <bits>
    backend: curve|symbolic
    pp-digest: <hex64>
    digest-alg: sha256
    entry: <index> <validated 0|1> <seq> <hex-upk>

The digest binds the directory to one set of public parameters; opening it
with different parameters fails. Writes go to a temporary file that is then
renamed over the manifest.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

from .dbe_ad import ad_is_valid
from .dbe_ss import PublicParams, ss_is_valid
from .errors import (
    AlreadyExists,
    BindingError,
    DBEError,
    DirectoryError,
    DuplicateIndex,
    MissingIndex,
    StrictModeInvalid,
    UnvalidatedKey,
)
from .wire import DIGEST_ALG, decode_public_key, encode_public_key, pp_digest

VERSION_LINE = "dbe-dir v1"


@dataclass(frozen=True)
class Entry:
    upk: bytes
    validated: bool
    seq: int


@dataclass
class Directory:
    path: str
    scheme: str
    L: int
    lam: int
    backend: str
    digest: str
    entries: Dict[int, Entry] = field(default_factory=dict)
    pp: Optional[PublicParams] = field(default=None, compare=False, repr=False)

    def to_text(self) -> str:
        lines = [
            VERSION_LINE,
            f"scheme: {self.scheme}",
            f"L: {self.L}",
            f"lambda: {self.lam}",
            f"backend: {self.backend}",
            f"pp-digest: {self.digest}",
            f"digest-alg: {DIGEST_ALG}",
        ]
        for j in sorted(self.entries):
            e = self.entries[j]
            lines.append(f"entry: {j} {int(e.validated)} {e.seq} {e.upk.hex()}")
        return "".join(line + "\n" for line in lines)

    def save(self) -> None:
        d = os.path.dirname(os.path.abspath(self.path))
        fd, tmp = tempfile.mkstemp(prefix=".dbe-dir-", dir=d)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(self.to_text())
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @property
    def next_seq(self) -> int:
        return max((e.seq for e in self.entries.values()), default=0) + 1


def _is_valid(pp: PublicParams, j: int, upk) -> bool:
    try:
        if pp.scheme == "AD":
            return ad_is_valid(j, upk, pp)
        return ss_is_valid(j, upk, pp)
    except DBEError:
        return False


def parse(text: str, path: str = "") -> Directory:
    lines = text.split("\n")
    if not lines or lines[-1] != "" or lines[0] != VERSION_LINE:
        raise DirectoryError("not a dbe-dir v1 manifest")
    header: Dict[str, str] = {}
    entries: Dict[int, Entry] = {}
    for line in lines[1:-1]:
        key, sep, value = line.partition(": ")
        if not sep:
            raise DirectoryError(f"malformed manifest line: {line!r}")
        if key == "entry":
            parts = value.split(" ")
            if len(parts) != 4 or parts[1] not in ("0", "1"):
                raise DirectoryError(f"malformed entry: {line!r}")
            j = int(parts[0])
            if j in entries:
                raise DirectoryError(f"duplicate entry for index {j}")
            entries[j] = Entry(bytes.fromhex(parts[3]), parts[1] == "1", int(parts[2]))
        else:
            header[key] = value
    required = ("scheme", "L", "lambda", "backend", "pp-digest", "digest-alg")
    if any(k not in header for k in required):
        raise DirectoryError("manifest header incomplete")
    if header["digest-alg"] != DIGEST_ALG:
        raise DirectoryError(f"unsupported digest algorithm {header['digest-alg']}")
    return Directory(path, header["scheme"], int(header["L"]), int(header["lambda"]),
                     header["backend"], header["pp-digest"], entries)


def dir_create(pp: PublicParams, scheme: str, path: str) -> Directory:
    if scheme != pp.scheme:
        raise BindingError(f"public parameters are for {pp.scheme}, not {scheme}")
    if os.path.exists(path):
        raise AlreadyExists(path)
    d = Directory(path, scheme, pp.users, pp.lam, pp.params.backend.value, pp_digest(pp), pp=pp)
    d.save()
    return d


def dir_load(path: str, pp: PublicParams) -> Directory:
    with open(path, encoding="utf-8", newline="") as fh:
        d = parse(fh.read(), path)
    if d.digest != pp_digest(pp) or d.scheme != pp.scheme:
        raise BindingError("directory is bound to different public parameters")
    d.pp = pp
    return d


def dir_register(d: Directory, j: int, upk, *, strict: bool = False) -> Directory:
    """Validate and append ``upk`` for index ``j``, then persist."""
    if d.pp is None:
        raise BindingError("directory has no public parameters attached")
    if j in d.entries:
        raise DuplicateIndex(f"index {j} already registered")
    if not 1 <= j <= d.L:
        raise DirectoryError(f"index {j} outside [1, {d.L}]")
    ok = _is_valid(d.pp, j, upk)
    if strict and not ok:
        raise StrictModeInvalid(f"public key for index {j} failed validation")
    d.entries[j] = Entry(encode_public_key(upk, d.pp), ok, d.next_seq)
    d.save()
    return d


def dir_get(d: Directory, S: Iterable[int], *, strict: bool = False) -> dict:
    out = {}
    for j in sorted(set(S)):
        if j not in d.entries:
            raise MissingIndex(f"index {j} is not registered")
        e = d.entries[j]
        if strict and not e.validated:
            raise UnvalidatedKey(f"index {j} holds an unvalidated key")
        out[j] = decode_public_key(e.upk, d.pp)
    return out
