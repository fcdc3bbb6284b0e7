"""Frame sources: directories of image files, or video files via OpenCV."""

from __future__ import annotations

from pathlib import Path

from PIL import Image

__all__ = ["FrameDecodeError", "load_frames", "probe_video_fps"]

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".ppm", ".webp")


class FrameDecodeError(RuntimeError):
    def __init__(self, frame_index: int, source: str, reason: str):
        self.frame_index = frame_index
        super().__init__(f"cannot decode frame {frame_index} of {source}: {reason}")


def _load_from_directory(directory: Path, stride: int) -> list[Image.Image]:
    files = sorted(
        p for p in directory.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not files:
        raise ValueError(f"{directory}: no frame images found")
    frames = []
    for index, path in enumerate(files[::stride]):
        try:
            with Image.open(path) as img:
                frames.append(img.convert("RGB"))
        except Exception as exc:
            raise FrameDecodeError(index * stride, str(directory), str(exc)) from exc
    return frames


def _load_from_video(path: Path, stride: int) -> list[Image.Image]:
    try:
        import cv2
    except ImportError as exc:
        raise RuntimeError(
            f"OpenCV is needed to decode video files ({path}); "
            "pass a frame directory instead"
        ) from exc
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise FrameDecodeError(0, str(path), "cannot open video")
    frames = []
    index = 0
    while True:
        ok, frame = capture.read()
        if not ok:
            break
        if index % stride == 0:
            if frame is None:
                raise FrameDecodeError(index, str(path), "empty frame")
            frames.append(Image.fromarray(frame[:, :, ::-1]))
        index += 1
    capture.release()
    if not frames:
        raise FrameDecodeError(0, str(path), "no frames decoded")
    return frames


def load_frames(source: str | Path, stride: int = 1) -> list[Image.Image]:
    """Decoded RGB frames from a frame directory or a video file.

    ``stride`` keeps every k-th frame, starting from the first; frame order
    is always the source order.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    source = Path(source)
    if source.is_dir():
        return _load_from_directory(source, stride)
    if source.is_file():
        return _load_from_video(source, stride)
    raise FileNotFoundError(source)


def probe_video_fps(source: str | Path) -> float | None:
    """Source frame rate from video metadata, None for frame directories."""
    source = Path(source)
    if source.is_dir():
        return None
    try:
        import cv2
    except ImportError:
        return None
    capture = cv2.VideoCapture(str(source))
    fps = capture.get(cv2.CAP_PROP_FPS) if capture.isOpened() else 0.0
    capture.release()
    return float(fps) if fps and fps > 0 else None
