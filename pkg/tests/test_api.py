"""Tests for API endpoints"""
import pytest
from fastapi.testclient import TestClient
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool
from app.database import Base, get_db
from app.main import app


@pytest.fixture
def db_session():
    """Create a test database session"""
    engine = create_engine(
        "sqlite:///:memory:",
        connect_args={"check_same_thread": False},
        poolclass=StaticPool,
    )
    Base.metadata.create_all(engine)
    TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    session = TestingSessionLocal()
    try:
        yield session
    finally:
        session.close()
        Base.metadata.drop_all(engine)


@pytest.fixture
def client(db_session):
    """Create a test client with database override"""
    def override_get_db():
        try:
            yield db_session
        finally:
            pass

    app.dependency_overrides[get_db] = override_get_db
    yield TestClient(app)
    app.dependency_overrides.clear()


def test_root_endpoint(client):
    """Test root endpoint"""
    response = client.get("/")
    assert response.status_code == 200
    data = response.json()
    assert "message" in data
    assert "endpoints" in data


@pytest.mark.parametrize("n,betti", [(1, [1, 3, 3, 1]), (2, [1, 3, 8, 12, 8, 3, 1])])
def test_betti(client, n, betti):
    """Test GET /cohomology/betti"""
    response = client.get("/cohomology/betti", params={"n": n})
    assert response.status_code == 200
    data = response.json()
    assert data["betti"] == betti
    assert data["total"] == sum(betti)


def test_betti_rejects_bad_prime(client):
    """A composite prime is a client error"""
    response = client.get("/cohomology/betti", params={"n": 1, "prime": 9})
    assert response.status_code == 400


def test_betti_rejects_large_n(client):
    """n is limited to 1..3"""
    response = client.get("/cohomology/betti", params={"n": 4})
    assert response.status_code == 422


def test_classes(client):
    """Test GET /cohomology/classes"""
    response = client.get("/cohomology/classes")
    assert response.status_code == 200
    names = [c["name"] for c in response.json()]
    assert len(names) == 152
    assert "rho k_1" in names


def test_product(client):
    """Test POST /products"""
    response = client.post("/products", json={"left": "h_{1,0}", "right": "e_{4,0}"})
    assert response.status_code == 200
    assert response.json()["product"] == {"e_{4,0}h_{1,0}": 1}


def test_product_unknown_class(client):
    """Unknown labels are rejected"""
    response = client.post("/products", json={"left": "omega_3", "right": "g_0"})
    assert response.status_code == 400


def test_zeta_gamma_rejects_small_n(client):
    """The ζ product needs n > 1"""
    response = client.get("/zeta-gamma", params={"n": 1, "s": 2})
    assert response.status_code == 400


def test_gamma_rejects_zero(client):
    """γ_0 does not exist"""
    response = client.get("/gamma/0")
    assert response.status_code == 400


def test_create_and_fetch_run(client):
    """Test POST /runs followed by GET /runs and GET /runs/{id}"""
    response = client.post("/runs", json={"suite": "cohomology"})
    assert response.status_code == 200
    report = response.json()
    assert report["status"] == "pass"
    assert report["run_id"]

    response = client.get("/runs")
    assert response.status_code == 200
    runs = response.json()
    assert len(runs) == 1
    assert runs[0]["command"] == "cohomology"

    response = client.get(f"/runs/{report['run_id']}")
    assert response.status_code == 200
    run = response.json()
    assert run["prime"] == 7
    assert [c["check_id"] for c in run["checks"]] == [c["check_id"] for c in report["checks"]]


def test_run_rejects_unknown_suite(client):
    """Suites are validated by the request schema"""
    response = client.post("/runs", json={"suite": "everything"})
    assert response.status_code == 422


def test_run_rejects_bad_prime(client):
    """Run configuration is validated before anything is computed"""
    response = client.post("/runs", json={"suite": "cohomology", "prime": 4})
    assert response.status_code == 400


def test_run_not_found(client):
    """Test GET /runs/{id} for a missing run"""
    response = client.get("/runs/does-not-exist")
    assert response.status_code == 404


def test_debug_pieces(client):
    """Test GET /debug/pieces"""
    response = client.get("/debug/pieces", params={"n": 1})
    assert response.status_code == 200
    data = response.json()
    assert data["cohomology_total"] == 8
    assert data["dga_dimension"] == 8
