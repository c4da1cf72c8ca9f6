"""Request/response models for the HTTP API."""

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str


class WordWeight(BaseModel):
    token: str
    weight: float


class BinWeight(BaseModel):
    bin: int
    rgb: list[int]
    weight: float


class TopicSummary(BaseModel):
    k: int
    topic_weight: float
    word_topic_weight: float
    color_topic_weight: float
    top_words: list[WordWeight]
    top_color_bins: list[BinWeight]


class TopicsResponse(BaseModel):
    n_topics: int
    topic_weights: list[float]
    word_topic_weights: list[float]
    color_topic_weights: list[float]
    topics: list[TopicSummary]


class PaletteHit(BaseModel):
    rank: int
    pool_index: int
    source_id: str | None = None
    colors: list[list[int]]
    score: float


class TopicPalettesResponse(BaseModel):
    k: int
    palettes: list[PaletteHit]


class QueryRequest(BaseModel):
    text: str
    n: int = Field(default=5, ge=1)


class QueryResponse(BaseModel):
    text: str
    weights: list[float]
    dropped_tokens: list[str]
    palettes: list[PaletteHit]


class RerankEntry(BaseModel):
    name: str
    score: float
    rank: int


class RerankResponse(BaseModel):
    text: str
    ranking: list[RerankEntry]
    skipped: list[str]


class ErrorResponse(BaseModel):
    error: str
    dropped_tokens: list[str] | None = None
