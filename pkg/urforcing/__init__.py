from urforcing.configuration import UrforcingConfiguration
from urforcing.exceptions import UrforcingError
from urforcing.forcing import ForcingEngine, check_forcing_theorem, find_witness, forces_semantic, forces_star
from urforcing.names import NamePool, PName, close_pool, make_name, mix, valuate
from urforcing.poset import Poset, fn_poset
from urforcing.universe import Urelement, make_set

__version__ = '0.1.0'
