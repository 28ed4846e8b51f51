"""Edge-unfolding checks for hat-based ununfoldable polyhedra.

Builds the acute and stacked hats and the polyhedron families made from
them, develops cut surfaces in the plane with float, interval or 256-bit
arithmetic, and certifies that no hat unfolds in one piece.
"""

from .constructions import (
    AcuteHatSpec,
    StackedHatSpec,
    acute_hat,
    caltrop,
    flat_hat,
    prism_containment_check,
    stacked_family,
    stacked_hat,
    subdivided_caltrop,
)
from .errors import UnunfoldError
from .io import export_mesh, export_svg, import_mesh, read_cuts, write_report
from .mesh import SurfaceMesh, build_mesh, curvature_report, region_subcomplex
from .unfold import classify_cuts_in_disk, develop, lemma3_filter, pieces_of
from .verify import (
    PathSystem,
    audit_cut_set,
    enumerate_dual_spanning_trees,
    enumerate_lemma3_paths,
    min_pieces_of_path_system,
    theorem_lower_bound,
    verify_hat_no_single_piece,
)

__version__ = "0.1.0"

__all__ = [
    "AcuteHatSpec", "StackedHatSpec", "SurfaceMesh", "PathSystem", "UnunfoldError",
    "acute_hat", "stacked_hat", "flat_hat", "caltrop", "subdivided_caltrop", "stacked_family",
    "prism_containment_check", "build_mesh", "curvature_report", "region_subcomplex",
    "develop", "pieces_of", "classify_cuts_in_disk", "lemma3_filter",
    "enumerate_dual_spanning_trees", "enumerate_lemma3_paths", "verify_hat_no_single_piece",
    "min_pieces_of_path_system", "theorem_lower_bound", "audit_cut_set",
    "import_mesh", "export_mesh", "read_cuts", "write_report", "export_svg",
]
