"""
Main FastAPI Application
"""
from fastapi import FastAPI

from dialoglens import __version__
from dialoglens.core.logging import setup_logging
from dialoglens.routers import protocols

setup_logging()

app = FastAPI(title="dialoglens", version=__version__)

# Routers
app.include_router(protocols.router)
