"""JSON documents for graphs, matrices, paths, certificates, colorings and fans, plus DOT export."""
import logging
from pathlib import Path as FilePath
from typing import List, Optional, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from core.errors import BadFanError, MatsumotoError, ParseError
from schemas.backend import Backend
from schemas.coloring import ColoringDocument
from schemas.fan import ChamberDocument, FanDocument
from schemas.graph import GraphDocument, RootDocument, SlotDocument, VertexDocument
from schemas.matrix import MatrixDocument
from schemas.path import CertificateDocument, MoveDocument, PathDocument
from services.braid import BraidMove, Certificate
from services.coloring import ColoringResult, global_coloring
from services.dual import Fan2D, FanChamber
from services.generators import CartanMatrix, CoxeterMatrix, build_from_file, matrix_from_document
from services.graph_model import MGraph, Path, path_from_roots
from services.scalars import get_backend

logger = logging.getLogger(__name__)

Document = TypeVar("Document", bound=BaseModel)


def parse_document(text: Union[str, bytes], model: Type[Document]) -> Document:
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise ParseError(f"invalid {model.__name__}: {e.errors()[0]['msg'] if e.errors() else e}")


def read_document(path: Union[str, FilePath], model: Type[Document]) -> Document:
    try:
        text = FilePath(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}")
    return parse_document(text, model)


def dump_document(doc: BaseModel) -> str:
    return doc.model_dump_json(indent=2)


# Graphs


def graph_to_document(g: MGraph) -> GraphDocument:
    impl = g.impl
    roots = [
        RootDocument(
            id=entry.id,
            coords=[impl.format(x) for x in entry.ray.dir],
            invertible=entry.invertible,
            neg=entry.neg,
        )
        for entry in g.roots
    ]
    vertices = [
        VertexDocument(
            id=rec.id,
            interior=rec.interior,
            basis=list(rec.basis),
            slots=[SlotDocument(via=s.via, to=s.to, infinite=s.infinite) for s in rec.slots],
        )
        for rec in g.vertices()
    ]
    return GraphDocument(
        dim=g.dim,
        backend=g.backend,
        base=g.base,
        roots=roots,
        vertices=vertices,
        metric=None if g.metric is None else [list(row) for row in g.metric],
        notes=list(g.notes),
    )


def dump_graph(g: MGraph) -> str:
    return dump_document(graph_to_document(g))


def load_graph(path: Union[str, FilePath], verify: bool = True) -> MGraph:
    return build_from_file(read_document(path, GraphDocument), verify=verify)


def load_matrix(path: Union[str, FilePath]) -> Union[CoxeterMatrix, CartanMatrix]:
    return matrix_from_document(read_document(path, MatrixDocument))


# Paths and certificates


def path_to_document(p: Path) -> PathDocument:
    return PathDocument(start=p.start, roots=list(p.roots))


def path_from_document(g: MGraph, doc: PathDocument) -> Path:
    return path_from_roots(g, doc.start, doc.roots)


def certificate_to_document(c: Certificate) -> CertificateDocument:
    return CertificateDocument(
        source=path_to_document(c.source),
        target=path_to_document(c.target),
        moves=[MoveDocument(pos=mv.pos, m=mv.m, replacement=list(mv.replacement)) for mv in c.moves],
    )


def certificate_from_document(g: MGraph, doc: CertificateDocument) -> Certificate:
    """Moves read from documents do not record the removed half."""
    return Certificate(
        source=path_from_document(g, doc.source),
        target=path_from_document(g, doc.target),
        moves=tuple(BraidMove(mv.pos, mv.m, tuple(mv.replacement)) for mv in doc.moves),
    )


# Colorings


def coloring_to_document(g: MGraph, result: ColoringResult) -> ColoringDocument:
    if not result.ok:
        return ColoringDocument(palette=list(range(g.dim)), witness=result.witness)
    coloring = result.coloring
    return ColoringDocument(palette=list(coloring.palette), edges=coloring.edge_colors(g))


# Fans


def fan_to_document(fan: Fan2D) -> FanDocument:
    impl = fan.impl
    chambers = []
    for chamber in fan.chambers:
        sliced = fan.ambient_dim == 3 and all(gen[2] > 0 for gen in chamber.generators)
        chambers.append(
            ChamberDocument(
                id=chamber.id,
                generators=[[impl.format(x) for x in gen] for gen in chamber.generators],
                points=[list(p) for p in chamber.points()] if sliced else None,
            )
        )
    return FanDocument(
        ambient_dim=fan.ambient_dim,
        backend=fan.backend,
        base=fan.base,
        chambers=chambers,
        open_walls=list(fan.open_walls),
        adjacency=fan.adjacency(),
        notes=list(fan.notes),
    )


def fan_from_document(doc: FanDocument) -> Fan2D:
    impl = get_backend(doc.backend)
    try:
        chambers = [
            FanChamber(c.id, tuple(impl.vector(gen) for gen in c.generators)) for c in doc.chambers
        ]
    except (ValueError, ZeroDivisionError) as e:
        raise BadFanError(f"invalid chamber coordinates ({e})")
    return Fan2D(doc.ambient_dim, doc.backend, chambers, [tuple(w) for w in doc.open_walls], doc.base, list(doc.notes))


# DOT


def _ray_label(g: MGraph, root: int) -> str:
    ray = g.roots.ray(root)
    if g.backend is Backend.RATIONAL:
        coords = [str(int(x)) for x in ray.dir]
    else:
        coords = [f"{float(x):.4g}" for x in ray.dir]
    return f"({', '.join(coords)})"


def to_dot(g: MGraph, coloring: Optional[ColoringResult] = None) -> str:
    """DOT digraph; compact edges are drawn undirected, infinite edges lead to phantom nodes."""
    if coloring is None:
        try:
            coloring = global_coloring(g)
        except MatsumotoError as e:
            logger.warning(f"DOT export without colors: {e}")
            coloring = ColoringResult()
    colors = coloring.coloring if coloring.ok else None

    def color(v: int, i: int) -> str:
        return "" if colors is None else f"c{colors.color(v, i)} "

    lines: List[str] = ["digraph matsumoto {"]
    for rec in g.vertices():
        style = "solid" if rec.interior else "dashed"
        lines.append(f'  v{rec.id} [label="{rec.id}", style={style}];')
    for rec in g.vertices():
        for i, slot in enumerate(rec.slots):
            label = f"{color(rec.id, i)}{_ray_label(g, slot.via)}"
            if slot.infinite:
                phantom = f"inf_{rec.id}_{i}"
                lines.append(f"  {phantom} [shape=point];")
                lines.append(f'  {phantom} -> v{rec.id} [label="{label}"];')
            elif slot.to is None:
                phantom = f"out_{rec.id}_{i}"
                lines.append(f"  {phantom} [shape=point, style=dashed];")
                lines.append(f'  v{rec.id} -> {phantom} [dir=none, style=dashed, label="{label}"];')
            elif rec.id < slot.to:
                lines.append(f'  v{rec.id} -> v{slot.to} [dir=none, label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
