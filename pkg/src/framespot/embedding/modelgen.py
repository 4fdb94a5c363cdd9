"""Generate a small self-contained two-tower TorchScript model.

The result is a deterministically-seeded (untrained) encoder pair in the
single-file format the TorchScript backend loads: ``forward`` maps image
tensors to embeddings, ``encode_text`` maps hashed token ids to the same
space. Untrained weights still separate visually distinct content, which
is enough for demos, fixtures, and pipeline tests; production use should
point the backend at a scripted export of a real joint encoder instead.
"""

from __future__ import annotations

import json
from pathlib import Path


def build_demo_model(
    out_path: str,
    dim: int = 128,
    input_resolution: int = 64,
    vocab_size: int = 4096,
    seed: int = 0,
) -> str:
    import torch

    class TwoTowerEncoder(torch.nn.Module):
        def __init__(self):
            super().__init__()
            self.conv = torch.nn.Sequential(
                torch.nn.Conv2d(3, 16, 5, stride=2, padding=2),
                torch.nn.ReLU(),
                torch.nn.Conv2d(16, 32, 3, stride=2, padding=1),
                torch.nn.ReLU(),
                torch.nn.Conv2d(32, 64, 3, stride=2, padding=1),
                torch.nn.ReLU(),
                torch.nn.AdaptiveAvgPool2d(1),
            )
            self.image_proj = torch.nn.Linear(64, dim)
            self.token_embed = torch.nn.Embedding(vocab_size, 64, padding_idx=0)
            self.text_proj = torch.nn.Linear(64, dim)

        def forward(self, images: torch.Tensor) -> torch.Tensor:
            feats = self.conv(images).flatten(1)
            return self.image_proj(feats)

        @torch.jit.export
        def encode_text(self, token_ids: torch.Tensor) -> torch.Tensor:
            mask = (token_ids != 0).float().unsqueeze(-1)
            embedded = self.token_embed(token_ids) * mask
            pooled = embedded.sum(1) / mask.sum(1).clamp(min=1.0)
            return self.text_proj(pooled)

    torch.manual_seed(seed)
    model = TwoTowerEncoder()
    model.eval()
    scripted = torch.jit.script(model)
    meta = {
        "dim": dim,
        "input_resolution": input_resolution,
        "text_vocab": vocab_size,
        "seed": seed,
    }
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    torch.jit.save(scripted, str(out), _extra_files={"framespot_meta.json": json.dumps(meta)})
    return str(out)
