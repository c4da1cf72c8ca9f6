from .app import ServiceConfig, build_app, create_app, serve

__all__ = ["ServiceConfig", "build_app", "create_app", "serve"]
