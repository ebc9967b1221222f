"""HTTP service exposing the coach to the web UI and other clients.

JSON over HTTP, versioned paths: POST /v1/coach, GET /v1/health,
GET /v1/grammar-info.  Spans on the wire are character offsets into the
submitted sentence so clients can highlight without re-tokenizing.
All artifacts are loaded once at startup and shared read-only.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import uuid
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import chart, coaching, grammar as gr, semantics, supertag
from .errors import InputError
from .resources import load_bundled_or_path

log = logging.getLogger("gramcoach.service")

MAX_SENTENCE_CHARS = 500


@dataclass
class ServiceConfig:
    grammar: str = "toy"
    supertag_model: str | None = None
    listen: str = "127.0.0.1:8099"
    reading_cap: int = chart.DEFAULT_READING_CAP
    supertag_k: int | None = None
    cors_origins: tuple = ()

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        unknown = set(data) - {
            "grammar", "supertag_model", "listen", "reading_cap",
            "supertag_k", "cors_origins",
        }
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        config = cls(**{k: v for k, v in data.items() if k != "cors_origins"})
        config.cors_origins = tuple(data.get("cors_origins", ()))
        return config

    @classmethod
    def from_env(cls):
        path = os.environ.get("COACH_CONFIG")
        config = cls.from_file(path) if path else cls()
        listen = os.environ.get("COACH_LISTEN")
        if listen:
            config.listen = listen
        return config


class CoachService:
    def __init__(self, config):
        self.config = config
        source = load_bundled_or_path(config.grammar)
        self.grammar_learner = gr.load_grammar(source, "learner")
        self.grammar_strict = gr.load_grammar(source, "strict")
        self.model = None
        self.model_hash = None
        if config.supertag_model:
            with open(config.supertag_model, encoding="utf-8") as handle:
                text = handle.read()
            self.model = supertag.load_model(text)
            self.model_hash = hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]

    def options(self, supertag_k=None):
        k = supertag_k if supertag_k is not None else self.config.supertag_k
        return chart.ParseOptions(
            reading_cap=self.config.reading_cap,
            supertag_model=self.model if k else None,
            supertag_k=k if self.model is not None else None,
        )

    def coach(self, sentence, supertag_k=None,
              include_dependencies=False, include_derivation=False):
        if not sentence or not sentence.strip():
            raise InputError("sentence is empty")
        if len(sentence) > MAX_SENTENCE_CHARS:
            raise InputError(
                f"sentence exceeds {MAX_SENTENCE_CHARS} characters"
            )
        verdict = coaching.coach_sentence(
            sentence, self.grammar_learner, self.grammar_strict,
            self.options(supertag_k),
        )
        return self.render(sentence, verdict, include_dependencies, include_derivation)

    def render(self, sentence, verdict, include_dependencies, include_derivation):
        token_objs = verdict.token_objs
        feedback = []
        for item in verdict.feedback:
            i, j = item.token_span
            feedback.append(
                {
                    "category": item.category,
                    "start": token_objs[i].start,
                    "end": token_objs[j - 1].end,
                    "surface": item.surface,
                    "expected": item.expected,
                    "message": item.message,
                }
            )
        body = {
            "sentence": sentence,
            "verdict": verdict.kind,
            "feedback": feedback,
            "corrected": verdict.corrected,
            "dependencies": None,
            "derivation": None,
            "stats": self._stats(verdict),
            "grammar_version": self.grammar_learner.version_label,
        }
        if verdict.reading is not None:
            if include_dependencies:
                graph = semantics.to_dependencies(verdict.reading.semantics)
                body["dependencies"] = [
                    f"{head} -{role}-> {dep}" for head, role, dep in graph.arcs
                ]
            if include_derivation:
                body["derivation"] = render_derivation(
                    verdict.reading.derivation, verdict.tokens
                )
        return body

    def _stats(self, verdict):
        stats = {}
        for label, result in (
            ("strict", verdict.strict_result),
            ("learner", verdict.learner_result),
        ):
            if result is not None:
                summary = result.stats.as_dict()
                summary.pop("lexical_gaps", None)
                stats[label] = summary
        return stats

    def grammar_info(self):
        g = self.grammar_learner
        return {
            "grammar_version": g.version_label,
            "strict_version": self.grammar_strict.version_label,
            "types": len(g.hierarchy.types),
            "lexical_entries": len(g.entries),
            "surface_forms": len(g.lexicon),
            "lexical_rules": len(g.lexical_rules),
            "learner_rules": sum(1 for r in g.lexical_rules if r.learner),
            "phrasal_rules": len(g.phrasal_rules),
            "feedback_templates": len(g.feedback_templates),
        }


def render_derivation(deriv, tokens, indent=0):
    pad = "  " * indent
    if deriv[0] == "lex":
        _, i, j, entry, chain = deriv
        chain_text = " + ".join(chain) if chain else "-"
        return f"{pad}{tokens[i]} [{i},{j}] {entry} ({chain_text})"
    rule, i, j, children = deriv
    lines = [f"{pad}{rule} [{i},{j}]"]
    for child in children:
        lines.append(render_derivation(child, tokens, indent + 1))
    return "\n".join(lines)


def create_app(config=None):
    config = config or ServiceConfig.from_env()
    service = CoachService(config)
    app = FastAPI(title="gramcoach", version="0.1.0")
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )
    app.state.service = service

    @app.post("/v1/coach")
    async def coach_endpoint(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return JSONResponse({"error": "body must be JSON"}, status_code=400)
        if not isinstance(payload, dict) or "sentence" not in payload:
            return JSONResponse({"error": "missing field: sentence"}, status_code=400)
        options = payload.get("options") or {}
        try:
            body = service.coach(
                payload["sentence"],
                supertag_k=options.get("supertag_k"),
                include_dependencies=bool(options.get("include_dependencies")),
                include_derivation=bool(options.get("include_derivation")),
            )
        except InputError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        except Exception:
            incident = uuid.uuid4().hex[:12]
            log.exception("coach request failed (incident %s)", incident)
            return JSONResponse({"error": f"internal error {incident}"}, status_code=500)
        return JSONResponse(body)

    @app.get("/v1/health")
    async def health_endpoint():
        return {
            "status": "ok",
            "grammar_version": service.grammar_learner.version_label,
            "model_hash": service.model_hash,
        }

    @app.get("/v1/grammar-info")
    async def grammar_info_endpoint():
        return service.grammar_info()

    return app
