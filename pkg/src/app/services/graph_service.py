"""
Graph generation service using matplotlib and seaborn
"""
import io
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from src.app.utils.hashing import canonical_json

logger = logging.getLogger(__name__)


def png_metadata(provenance: Optional[Dict[str, Any]] = None) -> Dict[str, Optional[str]]:
    """PNG text chunks: provenance instead of the matplotlib version banner"""
    return {"Software": None, "Description": canonical_json(provenance or {})}


class GraphService:
    """
    Service for generating charts of corpus statistics and model results
    """

    def __init__(self):
        plt.switch_backend("Agg")
        sns.set_style("whitegrid")
        sns.set_palette("husl")

    def _to_png(self, fig, provenance: Optional[Dict[str, Any]]) -> bytes:
        buf = io.BytesIO()
        fig.savefig(buf, format="png", dpi=150, bbox_inches="tight", metadata=png_metadata(provenance))
        plt.close(fig)
        buf.seek(0)
        return buf.getvalue()

    def generate_density_boxplot(
        self,
        densities: Sequence[int],
        title: str = "Log statements per logged method",
        provenance: Optional[Dict[str, Any]] = None,
    ) -> bytes:
        """
        Box plot of log statements per logged method on a log2 axis

        Args:
            densities: log statement count of every logged method
            title: chart title
            provenance: embedded as PNG metadata

        Returns:
            PNG image as bytes
        """
        try:
            if len(densities) == 0:
                logger.warning("No logged methods, density chart left empty")
                return self._generate_empty_chart(provenance)

            df = pd.DataFrame({"log statements": np.asarray(densities, dtype=float)})
            fig, ax = plt.subplots(figsize=(4, 6))
            sns.boxplot(data=df, y="log statements", ax=ax, width=0.4)
            ax.set_yscale("log", base=2)
            ax.set_ylabel("Log statements per method (log2)", fontsize=11, fontweight="bold")
            ax.set_title(title, fontsize=12, fontweight="bold", pad=12)
            fig.tight_layout()

            image_bytes = self._to_png(fig, provenance)
            logger.info(f"Generated density chart over {len(densities)} logged methods")
            return image_bytes

        except Exception as e:
            logger.error(f"Error generating density chart: {str(e)}")
            return self._generate_empty_chart(provenance)

    def generate_importance_chart(
        self,
        ranked: List[Tuple[str, float]],
        top_n: int = 10,
        title: str = "Feature importance",
        provenance: Optional[Dict[str, Any]] = None,
    ) -> bytes:
        """
        Horizontal bar chart of the top features of one model

        Args:
            ranked: (feature, importance) pairs, most important first
            top_n: number of bars
            title: chart title
            provenance: embedded as PNG metadata

        Returns:
            PNG image as bytes
        """
        try:
            if not ranked:
                logger.warning("No importances provided for chart generation")
                return self._generate_empty_chart(provenance)

            df = pd.DataFrame(ranked[:top_n], columns=["feature", "importance"])
            fig, ax = plt.subplots(figsize=(8, max(3, len(df) * 0.5)))
            bars = ax.barh(
                y=range(len(df)),
                width=df["importance"],
                color=sns.color_palette("husl", len(df)),
            )
            ax.set_yticks(range(len(df)))
            ax.set_yticklabels(df["feature"], fontsize=9)
            ax.invert_yaxis()

            top = max(df["importance"].max(), 1e-12)
            for bar, value in zip(bars, df["importance"]):
                ax.text(
                    bar.get_width() + top * 0.01,
                    bar.get_y() + bar.get_height() / 2,
                    f"{value:.3f}",
                    ha="left",
                    va="center",
                    fontsize=8,
                )

            ax.set_xlabel("Importance", fontsize=11, fontweight="bold")
            ax.set_title(title, fontsize=12, fontweight="bold", pad=12)
            fig.tight_layout()

            image_bytes = self._to_png(fig, provenance)
            logger.info(f"Generated importance chart with {len(df)} features")
            return image_bytes

        except Exception as e:
            logger.error(f"Error generating importance chart: {str(e)}")
            return self._generate_empty_chart(provenance)

    def _generate_empty_chart(self, provenance: Optional[Dict[str, Any]] = None) -> bytes:
        """
        Generate an empty chart placeholder

        Returns:
            PNG image as bytes
        """
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.text(
            0.5,
            0.5,
            "No data available",
            horizontalalignment="center",
            verticalalignment="center",
            fontsize=14,
            transform=ax.transAxes,
        )
        ax.axis("off")
        return self._to_png(fig, provenance)


# Global instance
graph_service = GraphService()
