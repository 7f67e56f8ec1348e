"""Switchable phonon beamsplitter for trapped-ion local modes.

Library layout:

* pulses            -- erf frequency-conversion ramps and their diagnostics
* lewis_riesenfeld  -- single-mode conversion analytics (phases, Bogoliubov
                       pair, Ermakov oracle solver)
* symplectic        -- two-mode Heisenberg-picture transform algebra,
                       target phases, chain planner, hopping-rate formula
* states            -- grid representations of Fock and grid-code states
* tdse              -- split-step propagation of the two-mode Hamiltonian
* experiments       -- end-to-end protocol reproductions and reports
* cli               -- command-line entry points
"""

__version__ = "0.1.0"
