from __future__ import annotations

from app.domain.exceptions import DetectorModelError
from app.domain.value_objects import DetectorModel, RenormalizedModel


def renormalize(model: DetectorModel) -> RenormalizedModel:
    """Factor the largest efficiency out as common transmission loss.

    Args:
        model: Absolute efficiencies.

    Returns:
        RenormalizedModel: Relative efficiencies (maximum exactly 1) and eta_0.

    Raises:
        DetectorModelError: If every efficiency is zero.
    """
    eta0 = model.max_efficiency
    if eta0 <= 0.0:
        raise DetectorModelError("All efficiencies are zero; nothing can be detected.")
    table = model.as_array() / eta0
    # Division by the maximum can land a hair away from 1.
    table[model.as_array() == eta0] = 1.0
    return RenormalizedModel(DetectorModel.from_array(model.scheme, table), eta0)
