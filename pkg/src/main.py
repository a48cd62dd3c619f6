from __future__ import annotations

from fastapi import FastAPI

from src.api.psi import router as psi_router
from src.psi import KERNEL_VERSION

app = FastAPI(title="PSI Kernel Service", version=KERNEL_VERSION)
app.include_router(psi_router)


@app.get("/health", tags=["meta"])
async def health() -> dict[str, str]:
    return {"status": "ok"}
