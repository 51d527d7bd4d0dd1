# API routes package
from fastapi import APIRouter
from importlib import import_module
from pathlib import Path
from typing import List, Tuple


def get_all_routers() -> List[Tuple[str, APIRouter]]:
    """Discover the routers of the endpoints package.

    Modules set ``USE_API_PREFIX = False`` to be mounted at the root instead
    of under the versioned prefix.
    """
    routers = []
    endpoints_dir = Path(__file__).parent / "endpoints"

    for file in sorted(endpoints_dir.glob("*.py")):
        if file.name == "__init__.py":
            continue
        module = import_module(f"api.endpoints.{file.stem}")
        router = getattr(module, "router", None)
        if router is None:
            continue
        if getattr(module, "USE_API_PREFIX", True):
            routers.append(("api", router))
        else:
            routers.append(("root", router))

    return routers
