from .element import element_stiffness, strain_energy_density, von_mises
from .solver import SolutionFields, assemble_stiffness, solve_system

__all__ = [
    "SolutionFields",
    "assemble_stiffness",
    "element_stiffness",
    "solve_system",
    "strain_energy_density",
    "von_mises",
]
