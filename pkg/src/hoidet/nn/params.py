"""Named parameter store and the binary checkpoint format.

Checkpoint layout: a UTF-8 text header of one ``name dim0 dim1 ...`` line
per parameter between a magic line and a ``data`` line, followed by the
raw little-endian float64 buffers in header order.
"""

from __future__ import annotations

import numpy as np

from .autograd import Var

MAGIC = "hoidet-params 1"


def he_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape)


class ParamStore:
    """Ordered name -> Var mapping; Vars may be shared across stores."""

    def __init__(self) -> None:
        self._params: dict[str, Var] = {}

    def param(self, name: str, value: np.ndarray) -> Var:
        if name in self._params:
            raise ValueError(f"duplicate parameter {name!r}")
        if any(ch.isspace() for ch in name):
            raise ValueError(f"parameter name {name!r} contains whitespace")
        v = Var(np.array(value, dtype=np.float64), name=name)
        self._params[name] = v
        return v

    def adopt(self, name: str, var: Var) -> Var:
        """Register an existing Var under this store (weight sharing)."""
        if name in self._params:
            raise ValueError(f"duplicate parameter {name!r}")
        self._params[name] = var
        return var

    def rebind(self, name: str, var: Var) -> None:
        """Point an existing entry at another Var of the same shape."""
        old = self._params[name]
        if old.value.shape != var.value.shape:
            raise ValueError(
                f"cannot rebind {name!r}: shape {old.value.shape} != {var.value.shape}"
            )
        self._params[name] = var

    def __getitem__(self, name: str) -> Var:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def names(self) -> list[str]:
        return list(self._params)

    def items(self):
        return self._params.items()

    def unique_vars(self) -> list[Var]:
        seen: set[int] = set()
        out = []
        for v in self._params.values():
            if id(v) not in seen:
                seen.add(id(v))
                out.append(v)
        return out

    def n_scalars(self) -> int:
        return sum(v.value.size for v in self.unique_vars())

    def zero_grad(self) -> None:
        for v in self.unique_vars():
            v.grad = None

    def save(self, path: str) -> None:
        lines = [MAGIC]
        for name, v in self._params.items():
            dims = " ".join(str(d) for d in v.value.shape)
            lines.append(f"{name} {dims}".rstrip())
        lines.append("data")
        header = ("\n".join(lines) + "\n").encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(header)
            for v in self._params.values():
                fh.write(np.ascontiguousarray(v.value, dtype="<f8").tobytes())

    def load(self, path: str) -> None:
        """Copy checkpoint values into existing parameters in place.

        Shapes and the full name set must match; in-place copy preserves
        any aliasing established at construction time.
        """
        with open(path, "rb") as fh:
            blob = fh.read()
        try:
            header_end = blob.index(b"data\n") + len(b"data\n")
        except ValueError:
            raise ValueError(f"{path}: missing data marker") from None
        lines = blob[:header_end].decode("utf-8").splitlines()
        if not lines or lines[0] != MAGIC:
            raise ValueError(f"{path}: bad magic line")
        entries = []
        for line in lines[1:-1]:
            fields = line.split()
            entries.append((fields[0], tuple(int(d) for d in fields[1:])))
        names = {name for name, _ in entries}
        if names != set(self._params):
            missing = sorted(set(self._params) - names)
            extra = sorted(names - set(self._params))
            raise ValueError(f"{path}: parameter mismatch (missing {missing}, extra {extra})")
        offset = header_end
        for name, shape in entries:
            v = self._params[name]
            if v.value.shape != shape:
                raise ValueError(f"{path}: {name} shape {shape} != {v.value.shape}")
            nbytes = int(np.prod(shape, dtype=np.int64)) * 8 if shape else 8
            buf = np.frombuffer(blob[offset : offset + nbytes], dtype="<f8")
            v.value[...] = buf.reshape(shape)
            offset += nbytes
        if offset != len(blob):
            raise ValueError(f"{path}: trailing bytes after parameter data")
