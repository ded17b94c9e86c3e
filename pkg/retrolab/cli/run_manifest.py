import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

ARTIFACT_VERSION = "0.1.0"
MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    """Record of one CLI run, enough to reproduce it: the resolved config and seed, plus what it wrote."""
    command: str
    config: dict
    seed: int | None = None
    artifact_version: str = ARTIFACT_VERSION
    outputs: list[str] = field(default_factory=list)
    duration_s: float = 0.0
    argv: list[str] = field(default_factory=list)
    started_at: float = field(default_factory=time.time)

    def finish(self, started: float):
        """Set the wall clock duration from a time.perf_counter() start mark."""
        self.duration_s = time.perf_counter() - started

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        return cls(
            command=data["command"],
            config=dict(data["config"]),
            seed=data.get("seed"),
            artifact_version=data.get("artifact_version", ARTIFACT_VERSION),
            outputs=list(data.get("outputs", [])),
            duration_s=float(data.get("duration_s", 0.0)),
            argv=list(data.get("argv", [])),
            started_at=float(data.get("started_at", 0.0)),
        )

    def store(self, out_dir: str | Path) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        if str(path) not in self.outputs:
            self.outputs.append(str(path))
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        return path

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        with open(path) as f:
            return cls.from_dict(json.load(f))
