"""HTTP service over a read-only model snapshot.

The checkpoint and palette pool load (and validate) before the app is
constructed; request handlers never mutate shared state, so concurrent
requests are safe and every response is reproducible for a given checkpoint.
"""

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from PIL import Image

from ..apps import (
    query_to_topic_weights,
    recolor_pattern,
    recommend_palettes,
    rerank_images,
    select_pixels,
)
from ..basis import bin_representative
from ..checkpoint import load_model
from ..errors import QueryError
from ..imaging import open_image
from ..jsonutil import round_floats
from ..palette import Palette5, load_pool, nearest_palettes
from ..topicmodel import TrainedModel
from . import schemas

TOP_ITEMS = 20


@dataclass(frozen=True)
class ServiceConfig:
    model_path: str
    pool_path: str
    bind: str = "127.0.0.1"
    port: int = 8000


def _palette_hits(hits) -> list[dict]:
    return [
        {
            "rank": rank + 1,
            "pool_index": idx,
            "source_id": pal.source_id,
            "colors": [list(c) for c in pal.colors],
            "score": score,
        }
        for rank, (idx, pal, score) in enumerate(hits)
    ]


def _png_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr.astype(np.uint8)).save(buf, format="PNG")
    return buf.getvalue()


def create_app(model: TrainedModel, pool: list[Palette5]) -> FastAPI:
    app = FastAPI(title="chromatika", version="0.1.0")

    # the explorer UI is served from its own origin
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.exception_handler(QueryError)
    async def _query_error(request: Request, exc: QueryError):
        return JSONResponse(
            status_code=422,
            content={"error": str(exc), "dropped_tokens": exc.dropped_tokens},
        )

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return {"status": "ok"}

    @app.get("/topics", response_model=schemas.TopicsResponse)
    def topics():
        summaries = []
        for k in range(model.n_topics):
            word_order = np.argsort(-model.psi[k], kind="stable")[:TOP_ITEMS]
            bin_order = np.argsort(-model.phi[k], kind="stable")[:TOP_ITEMS]
            summaries.append(
                {
                    "k": k,
                    "topic_weight": float(model.topic_weights[k]),
                    "word_topic_weight": float(model.word_topic_weights[k]),
                    "color_topic_weight": float(model.color_topic_weights[k]),
                    "top_words": [
                        {"token": model.vocabulary.tokens[w], "weight": float(model.psi[k, w])}
                        for w in word_order
                    ],
                    "top_color_bins": [
                        {
                            "bin": int(b),
                            "rgb": list(bin_representative(int(b))),
                            "weight": float(model.phi[k, b]),
                        }
                        for b in bin_order
                    ],
                }
            )
        return round_floats(
            {
                "n_topics": model.n_topics,
                "topic_weights": [float(v) for v in model.topic_weights],
                "word_topic_weights": [float(v) for v in model.word_topic_weights],
                "color_topic_weights": [float(v) for v in model.color_topic_weights],
                "topics": summaries,
            }
        )

    @app.get("/topics/{k}/palettes", response_model=schemas.TopicPalettesResponse)
    def topic_palettes(k: int, n: int = 5):
        if not 0 <= k < model.n_topics:
            return JSONResponse(status_code=404, content={"error": f"no topic {k}"})
        hits = nearest_palettes(model.phi[k], pool, n)
        return round_floats({"k": k, "palettes": _palette_hits(hits)})

    @app.post("/query", response_model=schemas.QueryResponse)
    def query(body: schemas.QueryRequest):
        q, hits = recommend_palettes(body.text, model, pool, body.n)
        return round_floats(
            {
                "text": body.text,
                "weights": [float(v) for v in q.weights],
                "dropped_tokens": list(q.dropped),
                "palettes": _palette_hits(hits),
            }
        )

    @app.post("/rerank", response_model=schemas.RerankResponse)
    async def rerank(text: str = Form(...), images: list[UploadFile] = File(...)):
        sources = []
        skipped = []
        for upload in images:
            name = upload.filename or f"upload-{len(sources)}"
            data = await upload.read()
            try:
                sources.append((name, open_image(io.BytesIO(data))))
            except ValueError:
                skipped.append(name)
        if not sources:
            return JSONResponse(status_code=400, content={"error": "no decodable images"})
        ranking = rerank_images(text, sources, model)
        return round_floats(
            {
                "text": text,
                "ranking": [
                    {"name": name, "score": score, "rank": rank + 1}
                    for rank, (name, score) in enumerate(ranking)
                ],
                "skipped": skipped,
            }
        )

    @app.post("/select-pixels")
    async def select_pixels_endpoint(
        image: UploadFile = File(...),
        text: str = Form(...),
        tau: float = Form(0.5),
        mask: bool = Form(False),
    ):
        data = await image.read()
        px_out, px_mask = select_pixels(open_image(io.BytesIO(data)), text, model, tau=tau)
        if mask:
            mask_img = Image.fromarray(px_mask).convert("1")
            buf = io.BytesIO()
            mask_img.save(buf, format="PNG")
            return Response(content=buf.getvalue(), media_type="image/png")
        return Response(content=_png_bytes(px_out), media_type="image/png")

    @app.post("/recolor")
    async def recolor_endpoint(image: UploadFile = File(...), text: str = Form(...)):
        data = await image.read()
        out = recolor_pattern(open_image(io.BytesIO(data)), text, model, pool)
        return Response(content=_png_bytes(out), media_type="image/png")

    return app


def build_app(config: ServiceConfig) -> FastAPI:
    model = load_model(Path(config.model_path))
    pool = load_pool(Path(config.pool_path))
    return create_app(model, pool)


def serve(config: ServiceConfig) -> None:
    import uvicorn

    app = build_app(config)
    uvicorn.run(app, host=config.bind, port=config.port, log_level="info")
