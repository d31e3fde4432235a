import os
from dataclasses import dataclass, field


def _default_output_dir() -> str:
    return os.environ.get('IDGS_OUTPUT_DIR', './data/results')


@dataclass
class Config:
    """Configuration for the simulators, planner checks and experiment harness."""

    # Numeric tolerances
    norm_tol: float = 1e-12  # Norm of validated pure states
    hermitian_tol: float = 1e-10  # Hermiticity / trace / positivity of density matrices
    fidelity_tol: float = 1e-10  # Closed-form state comparisons
    certainty_tol: float = 1e-9  # "Probability 1" claims

    # Capacity limits
    max_pure_qubits: int = 26
    max_mixed_qubits: int = 13

    # Noise backends
    dense_backend_max_qubits: int = 11  # Above this, 'auto' picks trajectories
    default_trajectories: int = 400
    min_trajectories: int = 100
    trajectory_batch: int = 512  # Trajectories simulated together as one array

    output_dir: str = field(default_factory=_default_output_dir)

    @classmethod
    def default(cls) -> 'Config':
        """Get default configuration."""
        return cls()
