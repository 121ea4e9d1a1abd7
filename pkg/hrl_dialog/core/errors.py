"""
예외 정의
"""


class HRLDialogError(Exception):
    """패키지 공통 예외"""


class ConfigError(HRLDialogError):
    """설정 오류 (CLI 종료 코드 1)"""


class KernelError(HRLDialogError):
    """커널 입력 오류"""


class NumericalError(HRLDialogError):
    """수치 계산 실패 (CLI 종료 코드 2)"""


class EpisodeError(HRLDialogError):
    """학습에 쓸 수 없는 에피소드"""


class OptionError(HRLDialogError):
    """옵션 실행 전제 조건 위반"""


class DatabaseError(HRLDialogError):
    """엔티티 DB 생성/조회 오류"""


class GoalSamplingError(HRLDialogError):
    """실현 가능한 사용자 목표를 만들지 못함"""


class FormatVersionError(HRLDialogError):
    """저장 파일 포맷 버전 불일치"""


class TransferError(HRLDialogError):
    """정책 전이 불가"""
