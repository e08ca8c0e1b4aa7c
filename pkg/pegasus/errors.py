"""
예외 계층 및 CLI 종료 코드 매핑

종료 코드 규약:
    0  성공
    2  입력 파싱 실패 / 파일 없음
    3  예산(budget) 충족 불가
    4  파라미터 오류
"""

from typing import Optional


class PegasusError(Exception):
    """모든 도메인 예외의 기반 클래스."""

    exit_code: int = 4


# ── 입력 / 포맷 ───────────────────────────────────────────────────────────────

class GraphFormatError(PegasusError):
    """edge-list 파일의 형식 오류. 줄 번호를 함께 보관한다."""

    exit_code = 2

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"{line_number}번째 줄: {message}"
        super().__init__(message)


class SummaryFormatError(PegasusError):
    """PGS v1 요약 파일의 형식 오류."""

    exit_code = 2


class EmptyGraphError(PegasusError):
    """전처리 후 남은 노드/엣지가 없음."""

    exit_code = 2


# ── 파라미터 ──────────────────────────────────────────────────────────────────

class ParameterError(PegasusError):
    exit_code = 4


class DisconnectedGraphError(PegasusError):
    """연결 그래프가 필요한 연산에 비연결 그래프가 들어옴."""

    exit_code = 4


class SizeGuardError(PegasusError):
    """검증용 전수 계산의 크기 제한 초과."""

    exit_code = 4


class DeadSupernodeError(PegasusError):
    exit_code = 4


class InvalidNodeError(PegasusError):
    exit_code = 4


class LengthMismatchError(PegasusError):
    exit_code = 4


class UndefinedCorrelationError(PegasusError):
    """상수 벡터에 대해서는 순위 상관계수가 정의되지 않는다."""

    exit_code = 4


# ── 예산 ──────────────────────────────────────────────────────────────────────

class BudgetInfeasibleError(PegasusError):
    """superedge 를 모두 제거해도 멤버십 비트만으로 예산을 넘는 경우."""

    exit_code = 3

    def __init__(self, residual_bits: float, budget_bits: float, machine: Optional[int] = None):
        self.residual_bits = residual_bits
        self.budget_bits = budget_bits
        self.machine = machine
        where = f"머신 {machine}: " if machine is not None else ""
        super().__init__(
            f"{where}예산 {budget_bits:.4f} bits 를 충족할 수 없음 "
            f"(superedge 없이도 {residual_bits:.4f} bits 필요)"
        )

    # 워커 프로세스에서 올라올 때 생성자 인자를 그대로 복원
    def __reduce__(self):
        return type(self), (self.residual_bits, self.budget_bits, self.machine)


def exit_code_for(exc: BaseException) -> int:
    """예외를 CLI 종료 코드로 변환한다."""
    if isinstance(exc, PegasusError):
        return exc.exit_code
    if isinstance(exc, (FileNotFoundError, IsADirectoryError)):
        return 2
    # ValueError 의 하위 클래스이지만 입력 파싱 실패로 본다
    if isinstance(exc, UnicodeDecodeError):
        return 2
    if isinstance(exc, ValueError):
        return 4
    return 1
