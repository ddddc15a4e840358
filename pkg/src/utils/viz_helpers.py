import plotly.express as px
import plotly.graph_objects as go
import pandas as pd
from pathlib import Path

from ..config import THEME_CONFIG, CHART_HEIGHT, CHART_WIDTH
from ..core.gof import GofReport
from ..inference.posterior import PosteriorSample


def create_base_figure(title: str = None) -> go.Figure:
    """
    Crée une figure de base avec le thème personnalisé
    """
    fig = go.Figure()
    fig.update_layout(
        template='plotly_white',
        height=CHART_HEIGHT,
        width=CHART_WIDTH,
        title=title,
        title_x=0.5,
        font=dict(color=THEME_CONFIG['text']),
        paper_bgcolor=THEME_CONFIG['background'],
        plot_bgcolor='white'
    )
    return fig


def style_chart(fig: go.Figure) -> go.Figure:
    """
    Applique le style commun aux graphiques
    """
    fig.update_xaxes(showgrid=True, gridwidth=1, gridcolor='#E1E5EA')
    fig.update_yaxes(showgrid=True, gridwidth=1, gridcolor='#E1E5EA')
    fig.update_layout(
        hoverlabel=dict(
            bgcolor="white",
            font_size=12,
            font_family="Arial"
        )
    )
    return fig


def create_gof_figure(report: GofReport, title: str = "Degrés pondérés") -> go.Figure:
    """
    Une ligne grise par réplique simulée, la ligne observée par-dessus
    """
    fig = create_base_figure(title)
    nodes = list(range(report.n_nodes))
    for rep in range(report.n_replicates):
        fig.add_trace(go.Scatter(
            x=nodes, y=report.simulated[rep], mode='lines',
            line=dict(color=THEME_CONFIG['replicate'], width=1),
            opacity=0.4, showlegend=rep == 0, name='simulé', hoverinfo='skip'
        ))
    fig.add_trace(go.Scatter(
        x=nodes, y=report.observed, mode='lines+markers',
        line=dict(color=THEME_CONFIG['primary'], width=2), name='observé'
    ))
    fig.update_layout(xaxis_title="Nœud", yaxis_title="Degré pondéré")
    return style_chart(fig)


def create_trace_figure(sample: PosteriorSample, layer: int, param_index: int) -> go.Figure:
    """
    Trace MCMC d'un paramètre de couche, une couleur par chaîne
    """
    label = sample.labels[param_index]
    df = pd.DataFrame({
        'iteration': list(sample.iterations) * sample.n_chains,
        'value': sample.phi[:, :, layer - 1, param_index].ravel(),
        'chain': [str(c) for c in range(sample.n_chains) for _ in range(sample.n_kept)],
    })
    fig = px.line(
        df,
        x='iteration',
        y='value',
        color='chain',
        title=f"phi_{layer} ({label})",
        height=CHART_HEIGHT,
        width=CHART_WIDTH
    )
    return style_chart(fig)


def create_posterior_histogram(sample: PosteriorSample, layer: int, param_index: int) -> go.Figure:
    label = sample.labels[param_index]
    fig = px.histogram(
        x=sample.phi[:, :, layer - 1, param_index].ravel(),
        nbins=40,
        title=f"Loi a posteriori de phi_{layer} ({label})",
        height=CHART_HEIGHT,
        width=CHART_WIDTH
    )
    fig.update_traces(marker_color=THEME_CONFIG['secondary'])
    fig.update_layout(xaxis_title="valeur", yaxis_title="effectif")
    return style_chart(fig)


def write_figure(fig: go.Figure, path) -> Path:
    """Exporte la figure en HTML, plotly.js chargé depuis le CDN"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.write_html(str(path), include_plotlyjs='cdn', full_html=True)
    return path
