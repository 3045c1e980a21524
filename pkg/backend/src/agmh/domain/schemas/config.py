from __future__ import annotations

from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ...core.errors import AGMError
from ..targets import Box, MixtureTargetSpec, TargetModel, gaussian_mixture_target, quartic_bimodal

Bounds = List[Tuple[float, float]]
_UINT64 = 2**64


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class InitMeans(_Strict):
    """初始均值策略：显式给点，或在盒子中均匀抽取（统一盒子 box / 每分量一个 boxes）。"""
    points: Optional[List[List[float]]] = None
    box: Optional[Bounds] = None
    boxes: Optional[List[Bounds]] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "InitMeans":
        given = [k for k in ("points", "box", "boxes") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"init_means needs exactly one of points/box/boxes, got {given or 'none'}")
        for b in self._all_bounds():
            if any(lo >= hi for lo, hi in b):
                raise ValueError(f"empty box {b}")
        return self

    def _all_bounds(self) -> List[Bounds]:
        if self.box is not None:
            return [self.box]
        return list(self.boxes or [])

    def dims(self) -> List[int]:
        if self.points is not None:
            return [len(p) for p in self.points]
        return [len(b) for b in self._all_bounds()]

    def count(self) -> Optional[int]:
        """显式点或 boxes 决定分量数；单一 box 不限定。"""
        if self.points is not None:
            return len(self.points)
        if self.boxes is not None:
            return len(self.boxes)
        return None


class SamplerConfig(_Strict):
    components: int = Field(2, ge=1, description="混合分量数 N")
    t_train: int = Field(200, ge=0)
    t_stop: Optional[int] = Field(None, ge=0, description="为空时取 t_tot；0 表示从不自适应")
    t_tot: int = Field(5000, ge=1)
    epsilon: float = Field(1e-6, gt=0.0)
    init_means: InitMeans
    init_sigma2: float = Field(10.0, gt=0.0)
    x0: Union[Literal["standard_normal"], List[float]] = "standard_normal"
    update_rule: Literal["recursive", "block"] = "recursive"
    keep_history: bool = False
    seed: int = Field(0, ge=0, lt=_UINT64, description="未传入 rng 时链自己的随机种子")

    @model_validator(mode="after")
    def _check(self) -> "SamplerConfig":
        stop = self.stop
        if stop > self.t_tot:
            raise ValueError(f"t_stop ({stop}) must not exceed t_tot ({self.t_tot})")
        if stop != 0 and not self.t_train < stop:
            raise ValueError(f"t_train ({self.t_train}) must be smaller than t_stop ({stop})")
        n = self.init_means.count()
        if n is not None and n != self.components:
            raise ValueError(f"init_means gives {n} components but components = {self.components}")
        if len(set(self.init_means.dims())) > 1:
            raise ValueError("init_means entries disagree on dimension")
        if self.update_rule == "block" and not self.keep_history:
            raise ValueError("update_rule 'block' needs keep_history: true")
        return self

    @property
    def stop(self) -> int:
        return self.t_tot if self.t_stop is None else self.t_stop

    def frozen(self) -> "SamplerConfig":
        """同配置的非自适应版本（t_stop = 0）。"""
        return self.model_copy(update={"t_stop": 0})


class QuarticTargetConfig(_Strict):
    kind: Literal["quartic_bimodal"] = "quartic_bimodal"

    @property
    def dim(self) -> int:
        return 1

    def build(self) -> TargetModel:
        return quartic_bimodal()


class MixtureTargetConfig(_Strict):
    kind: Literal["gaussian_mixture"] = "gaussian_mixture"
    weights: List[float]
    means: List[Union[float, List[float]]]
    covariances: List[Union[float, List[List[float]]]]

    @model_validator(mode="after")
    def _check(self) -> "MixtureTargetConfig":
        m = len(self.weights)
        if not (len(self.means) == len(self.covariances) == m) or m == 0:
            raise ValueError(
                f"mixture target needs equal nonzero counts of weights ({m}), means ({len(self.means)}) "
                f"and covariances ({len(self.covariances)})"
            )
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must be nonnegative and sum to 1: {self.weights}")
        try:
            self.spec()
        except AGMError as e:
            raise ValueError(f"invalid mixture target: {e}") from e
        return self

    @property
    def dim(self) -> int:
        first = self.means[0]
        return 1 if isinstance(first, (int, float)) else len(first)

    def spec(self) -> MixtureTargetSpec:
        means = [[m] if isinstance(m, (int, float)) else m for m in self.means]
        return MixtureTargetSpec.create(self.weights, means, self.covariances)

    def build(self) -> TargetModel:
        return gaussian_mixture_target(self.spec())


TargetConfig = Annotated[Union[QuarticTargetConfig, MixtureTargetConfig], Field(discriminator="kind")]


class TruthConfig(_Strict):
    mean: Optional[List[float]] = None
    z: Optional[float] = None


class MetricsConfig(_Strict):
    z_draws: Optional[int] = Field(None, ge=1)
    oracle_grid: Optional[int] = Field(None, ge=3)
    oracle_box: Optional[Bounds] = None

    def box(self) -> Optional[Box]:
        return Box.from_bounds(self.oracle_box) if self.oracle_box else None


class OutputConfig(_Strict):
    dir: Optional[str] = None
    render: bool = False


class ExperimentConfig(_Strict):
    name: str = Field(..., min_length=1)
    description: str = ""
    target: TargetConfig
    sampler: Literal["agm", "baseline"] = "agm"
    chain: SamplerConfig
    runs: int = Field(1, ge=1)
    master_seed: int = Field(0, ge=0, lt=_UINT64)
    truth: TruthConfig = Field(default_factory=TruthConfig)
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)
    outputs: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _check_dims(self) -> "ExperimentConfig":
        d = self.target.dim
        dims = set(self.chain.init_means.dims())
        if dims and dims != {d}:
            raise ValueError(f"init_means dimension {sorted(dims)} does not match target dimension {d}")
        if isinstance(self.chain.x0, list) and len(self.chain.x0) != d:
            raise ValueError(f"x0 has length {len(self.chain.x0)}, target dimension is {d}")
        if self.truth.mean is not None and len(self.truth.mean) != d:
            raise ValueError(f"truth.mean has length {len(self.truth.mean)}, target dimension is {d}")
        if self.metrics.oracle_box is not None and len(self.metrics.oracle_box) != d:
            raise ValueError(f"metrics.oracle_box has {len(self.metrics.oracle_box)} axes, target dimension is {d}")
        if d > 2 and (self.truth.mean is None or self.truth.z is None):
            raise ValueError("targets with d > 2 need truth.mean and truth.z (no quadrature oracle)")
        return self

    def sampler_config(self) -> SamplerConfig:
        return self.chain.frozen() if self.sampler == "baseline" else self.chain
