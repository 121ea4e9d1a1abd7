"""정책 적응 패키지"""
from .transfer import PolicyTransferSpec, adapt_policy, restrict_action_kernel

__all__ = ["PolicyTransferSpec", "adapt_policy", "restrict_action_kernel"]
