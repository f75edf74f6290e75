"""Exception hierarchy shared by all mupolab modules."""


class MupolabError(Exception):
    """Base class; `code` is the stable identifier used in CLI error JSON."""
    code = "MupolabError"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


def _mk(name, doc):
    return type(name, (MupolabError,), {"__doc__": doc, "code": name})


InvalidGeometry = _mk("InvalidGeometry", "Mushroom parameters violate 0 < r < R, L > 0 or the hole lies off its wall.")
CornerHit = _mk("CornerHit", "Impact point within the corner tolerance of a segment junction.")
NumericalStall = _mk("NumericalStall", "Flight time below the stall threshold.")
NotOnBoundary = _mk("NotOnBoundary", "State is not on the billiard boundary.")
DepthExceeded = _mk("DepthExceeded", "Continued fraction did not terminate or repeat within the depth budget.")
DomainError = _mk("DomainError", "Argument outside the domain where a bound is valid.")
UnboundedEvenQuotients = _mk("UnboundedEvenQuotients", "Even partial quotients cannot be certified bounded.")
InvalidC = _mk("InvalidC", "Intermediate convergent index outside 1 <= c < a_{n+2}.")
UnsupportedAlpha = _mk("UnsupportedAlpha", "Formula only holds for the semicircular hat.")
HoleInIsland = _mk("HoleInIsland", "Hole overlaps the regular island.")
TailNotConverged = _mk("TailNotConverged", "Requested tolerance unreachable with the given period cutoff.")
NotAMupoOrientation = _mk("NotAMupoOrientation", "sin(theta) exceeds rho, no surviving arc interval.")
DegenerateZeta = _mk("DegenerateZeta", "1/rho is an integer, the zeta reflection window is empty.")
OrderingAmbiguous = _mk("OrderingAmbiguous", "Neither corner-threshold chain holds.")
ConfigError = _mk("ConfigError", "Malformed or unknown configuration entry.")
