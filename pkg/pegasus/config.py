"""
설정 모델 및 난수 스트림

- EngineConfig : 요약 엔진 입력 파라미터
- QueryConfig  : RWR / PHP 반복 계산 파라미터
- RunConfig    : CLI 전역 설정 (seed, threads, log level, output)

기본값은 실험 설정(α=1.25, β=0.1, t_max=20, 재시작 확률 0.05, PHP c=0.95)을 따른다.
"""

import os
import zlib
from typing import Literal, Optional, Type, TypeVar

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from pegasus.errors import ParameterError

DEFAULT_ALPHA = 1.25
DEFAULT_BETA = 0.1
DEFAULT_MAX_ITERATIONS = 20
DEFAULT_WALK_PROB = 0.95
DEFAULT_PHP_C = 0.95

_M = TypeVar("_M", bound=BaseModel)


# ── 엔진 설정 ─────────────────────────────────────────────────────────────────

class EngineConfig(BaseModel):
    budget_bits: float = Field(..., gt=0, description="요약 그래프 크기 예산 k (bits)")
    alpha: float = Field(DEFAULT_ALPHA, ge=1.0, description="개인화 정도 α (≥ 1)")
    beta: float = Field(DEFAULT_BETA, gt=0.0, lt=1.0, description="적응형 임계값 파라미터 β")
    max_iterations: int = Field(DEFAULT_MAX_ITERATIONS, gt=0, description="최대 반복 횟수 t_max")
    seed: int = Field(0, description="모든 난수 스트림의 마스터 시드")
    group_cap: int = Field(500, gt=1, description="후보 그룹 최대 크기")
    shingle_rounds: int = Field(10, gt=0, description="후보 그룹 재분할(shingle) 최대 라운드 수")
    theta_init: float = Field(0.5, description="초기 임계값 θ")
    threshold_mode: Literal["adaptive", "fixed"] = Field(
        "adaptive",
        description="'adaptive': L 의 ⌊β|L|⌋번째 최댓값 / 'fixed': θ(t)=1/(1+t), t≥t_max 이면 0",
    )
    reduction: Literal["relative", "absolute"] = Field(
        "relative", description="병합 점수: 상대 비용 감소 | 절대 비용 감소"
    )
    audit: bool = Field(False, description="병합 순서 / θ 추적 감사 로그 기록 여부")

    model_config = {"frozen": True}


class QueryConfig(BaseModel):
    walk_prob: float = Field(DEFAULT_WALK_PROB, gt=0.0, lt=1.0, description="RWR 이동 확률 (1 - 재시작 확률)")
    php_c: float = Field(DEFAULT_PHP_C, gt=0.0, lt=1.0, description="PHP 감쇠 계수 c")
    tol: float = Field(1e-9, gt=0.0, description="수렴 판정 허용오차")
    max_iters: int = Field(1000, gt=0, description="최대 반복 횟수")

    model_config = {"frozen": True}


class RunConfig(BaseModel):
    seed: int = Field(0, description="마스터 시드 (PEGASUS_SEED 로 덮어쓰기 가능)")
    threads: int = Field(1, ge=1, description="evaluate / distsim 병렬 워커 수 (PEGASUS_THREADS)")
    log_level: str = Field("WARNING", description="logging 레벨")
    output: Optional[str] = Field(None, description="출력 경로 (없으면 stdout)")

    @field_validator("log_level")
    @classmethod
    def _upper(cls, value: str) -> str:
        return value.upper()


def validated(model: Type[_M], **kwargs) -> _M:
    """pydantic 검증 오류를 ParameterError 로 변환하여 모델을 생성한다."""
    try:
        return model(**kwargs)
    except ValidationError as exc:
        raise ParameterError(str(exc)) from exc


def resolve_run_config(
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    log_level: str = "WARNING",
    output: Optional[str] = None,
) -> RunConfig:
    """플래그 > 환경 변수 > 기본값 순으로 전역 설정을 결정한다."""
    if seed is None and os.environ.get("PEGASUS_SEED"):
        seed = _env_int("PEGASUS_SEED")
    if threads is None and os.environ.get("PEGASUS_THREADS"):
        threads = _env_int("PEGASUS_THREADS")
    return validated(
        RunConfig,
        seed=seed if seed is not None else 0,
        threads=threads if threads is not None else 1,
        log_level=log_level,
        output=output,
    )


def _env_int(name: str) -> int:
    raw = os.environ[name]
    try:
        return int(raw)
    except ValueError as exc:
        raise ParameterError(f"환경 변수 {name} 은 정수여야 합니다: {raw!r}") from exc


# ── 난수 스트림 ───────────────────────────────────────────────────────────────

def substream(seed: int, name: str, *keys: int) -> np.random.Generator:
    """마스터 시드에서 이름 붙은 독립 난수 스트림을 만든다.

    같은 (seed, name, keys) 는 항상 같은 스트림을 돌려준다.
    """
    tag = zlib.crc32(name.encode("utf-8"))
    seq = np.random.SeedSequence(entropy=[seed & 0xFFFFFFFFFFFFFFFF, tag, *[int(k) for k in keys]])
    return np.random.default_rng(seq)
