import json
from pathlib import Path

import numpy as np

from chromatika.palette import Palette5
from chromatika.service import create_app

from conftest import make_model

DOC = Path(__file__).parent.parent / "docs" / "openapi.json"


def test_committed_openapi_is_current():
    phi = np.zeros((2, 512))
    phi[:, 0] = 1.0
    psi = np.zeros((2, 2))
    psi[0, 0] = 1.0
    psi[1, 1] = 1.0
    model = make_model(phi, psi, ("qb", "qc"))
    app = create_app(model, [Palette5(((0, 0, 0),) * 5)])
    expected = json.dumps(app.openapi(), indent=2, sort_keys=True) + "\n"
    assert DOC.read_text() == expected, (
        "docs/openapi.json is stale; regenerate it from create_app().openapi()"
    )
